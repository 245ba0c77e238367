"""Pure-python stand-in for the torch API subset used by the bundled
test corpus.

The module is installed into ``sys.modules`` under the name ``torch`` by
the worker when the execution backend is the defect simulator, so test
sources written against the real framework run unmodified without it.

A distortion registry applies configurable fault classes to operations
executed inside a ``compile()``-wrapped call, leaving eager execution
untouched. With no distortions enabled the wrapped call is the identity.
"""

import builtins
import math
import random
import struct
import sys
import types

# ---------------------------------------------------------------------------
# dtypes

class DType:
    def __init__(self, name, is_float):
        self.name = name
        self.is_floating_point = is_float

    def __repr__(self):
        return "torch." + self.name

    def __hash__(self):
        return hash(self.name)

    def __eq__(self, other):
        if isinstance(other, DType):
            return self.name == other.name
        return NotImplemented


float16 = DType("float16", True)
float32 = DType("float32", True)
float64 = DType("float64", True)
int32 = DType("int32", False)
int64 = DType("int64", False)
bool_ = DType("bool", False)
long = int64
double = float64
_DTYPES = {d.name: d for d in (float16, float32, float64, int32, int64, bool_)}


class _Device:
    def __init__(self, kind):
        self.type = kind

    def __repr__(self):
        return "device(type='%s')" % self.type

    def __eq__(self, other):
        if isinstance(other, _Device):
            return self.type == other.type
        if isinstance(other, str):
            return self.type == other
        return NotImplemented


def device(kind="cpu"):
    return _Device(str(kind).split(":")[0])


# ---------------------------------------------------------------------------
# RNG. A dedicated Random instance so test behavior is independent of the
# interpreter-global generator.

_rng = random.Random(0)
_last_seed = 0


def manual_seed(seed):
    global _last_seed
    _last_seed = int(seed)
    _rng.seed(_last_seed)
    return None


# ---------------------------------------------------------------------------
# Distortion registry (the fault-injection shim).

class _Distortions:
    BOUNDARY_OPS = ("unsqueeze", "squeeze", "cat", "stack", "softmax",
                    "cumsum", "transpose", "narrow", "split")
    DOWNCAST_OPS = ("matmul", "mm", "addmm")
    LAYOUT_CONSUMERS = ("matmul", "mm", "addmm", "softmax", "cumsum")
    # consumer -> producer-chain suffixes (oldest..newest) that are misfolded.
    MISFOLD_CHAINS = {
        "exp": (("matmul",), ("mm",), ("addmm",)),
        "tanh": (("split", "stack"),),
        "div": (("mul", "neg"),),
    }
    MISFOLD_CAT_PRODUCERS = ("split", "addmm")

    def __init__(self):
        self.enabled = {}
        self.fired = set()
        self.compiled_depth = 0
        self.detached = []  # (view_tensor, base_tensor, index_map, kind)

    def configure(self, defects):
        self.enabled = dict(defects or {})
        self.fired = set()

    def active(self, name):
        return self.compiled_depth > 0 and name in self.enabled

    def params(self, name):
        return self.enabled.get(name) or {}

    def fire(self, name):
        self.fired.add(name)


_dist = _Distortions()


def _configure_distortions(defects):
    _dist.configure(defects)


def _fired_defects():
    return sorted(_dist.fired)


def _half_round(v):
    """Round a python float through IEEE binary16."""
    if isinstance(v, bool) or not isinstance(v, float):
        return v
    if math.isnan(v) or math.isinf(v):
        return v
    try:
        return struct.unpack("<e", struct.pack("<e", v))[0]
    except OverflowError:
        return math.inf if v > 0 else -math.inf


# ---------------------------------------------------------------------------
# Tensor

def _contig_strides(shape):
    strides = [1] * len(shape)
    for i in range(len(shape) - 2, -1, -1):
        strides[i] = strides[i + 1] * shape[i + 1]
    return tuple(strides)


def _numel(shape):
    n = 1
    for s in shape:
        n *= s
    return n


def _all_indices(shape):
    if not shape:
        yield ()
        return
    idx = [0] * len(shape)
    while True:
        yield tuple(idx)
        d = len(shape) - 1
        while d >= 0:
            idx[d] += 1
            if idx[d] < shape[d]:
                break
            idx[d] = 0
            d -= 1
        if d < 0:
            return


class Size(tuple):
    def numel(self):
        return _numel(self)


class Tensor:
    def __init__(self, storage, shape, strides, offset, dtype, base=None):
        self._storage = storage
        self._shape = tuple(shape)
        self._strides = tuple(strides)
        self._offset = offset
        self._dtype = dtype
        self._base = base
        self._chain = ()

    # -- metadata ----------------------------------------------------------
    @property
    def shape(self):
        return Size(self._shape)

    def size(self, dim=None):
        if dim is None:
            return Size(self._shape)
        return self._shape[dim]

    @property
    def dtype(self):
        return self._dtype

    @property
    def device(self):
        return _Device("cpu")

    @property
    def ndim(self):
        return len(self._shape)

    def dim(self):
        return len(self._shape)

    def numel(self):
        return _numel(self._shape)

    def stride(self):
        return self._strides

    def storage_offset(self):
        return self._offset

    def is_contiguous(self):
        if self.numel() <= 1:
            return True
        expect = _contig_strides(self._shape)
        for s, st, e in zip(self._shape, self._strides, expect):
            if s > 1 and st != e:
                return False
        return True

    def is_floating_point(self):
        return self._dtype.is_floating_point

    def element_size(self):
        return 8

    def __len__(self):
        if not self._shape:
            raise TypeError("len() of a 0-d tensor")
        return self._shape[0]

    # -- storage access ----------------------------------------------------
    def _flat(self, idx):
        p = self._offset
        for i, s in zip(idx, self._strides):
            p += i * s
        return p

    def _get(self, idx):
        return self._storage[self._flat(idx)]

    def _set(self, idx, value):
        self._storage[self._flat(idx)] = value

    def _values(self):
        return [self._get(i) for i in _all_indices(self._shape)]

    def tolist(self):
        def build(dim, prefix):
            if dim == len(self._shape):
                return self._get(prefix)
            return [build(dim + 1, prefix + (i,)) for i in range(self._shape[dim])]

        return build(0, ())

    def item(self):
        if self.numel() != 1:
            raise ValueError("item(): tensor has %d elements" % self.numel())
        return self._get(next(_all_indices(self._shape)))

    def __float__(self):
        return float(self.item())

    def __int__(self):
        return int(self.item())

    def __bool__(self):
        if self.numel() != 1:
            raise RuntimeError("Boolean value of Tensor with more than one element is ambiguous")
        return bool(self.item())

    def __repr__(self):
        return "tensor(%s)" % (self.tolist(),)

    def _root(self):
        t = self
        while t._base is not None:
            t = t._base
        return t

    def _tag(self, op, src=None):
        chain = src._chain if isinstance(src, Tensor) else ()
        self._chain = tuple(chain[-3:]) + (op,)
        return self

    # -- views ---------------------------------------------------------------
    def _make_view(self, shape, strides, offset, op):
        v = Tensor(self._storage, shape, strides, offset, self._dtype, base=self._root())
        v._tag(op, self)
        return v

    def contiguous(self):
        if self.is_contiguous():
            return self
        return _from_values(self._values(), self._shape, self._dtype)._tag("contiguous", self)

    def clone(self):
        return _from_values(self._values(), self._shape, self._dtype)._tag("clone", self)

    def detach(self):
        return self._make_view(self._shape, self._strides, self._offset, "detach")

    def reshape(self, *shape):
        shape = _normalize_shape_args(shape)
        shape = _resolve_negative_one(shape, self.numel())
        if _numel(shape) != self.numel():
            raise RuntimeError("reshape: invalid shape %s for %d elements" % (shape, self.numel()))
        if self.is_contiguous():
            base_offset = self._offset
            v = Tensor(self._storage, shape, _contig_strides(shape), base_offset,
                       self._dtype, base=self._root())
            return v._tag("reshape", self)
        return _from_values(self._values(), shape, self._dtype)._tag("reshape", self)

    def view(self, *shape):
        shape = _normalize_shape_args(shape)
        shape = _resolve_negative_one(shape, self.numel())
        if not self.is_contiguous():
            raise RuntimeError("view(): tensor is not contiguous; use reshape")
        if _numel(shape) != self.numel():
            raise RuntimeError("view: shape mismatch")
        v = Tensor(self._storage, shape, _contig_strides(shape), self._offset,
                   self._dtype, base=self._root())
        return v._tag("view", self)

    def flatten(self, start_dim=0, end_dim=-1):
        nd = max(self.dim(), 1)
        if end_dim < 0:
            end_dim += nd
        if start_dim == 0 and end_dim == nd - 1:
            return self.reshape(self.numel())
        shape = list(self._shape)
        merged = 1
        for s in shape[start_dim:end_dim + 1]:
            merged *= s
        new_shape = shape[:start_dim] + [merged] + shape[end_dim + 1:]
        return self.reshape(*new_shape)

    def expand(self, *sizes):
        sizes = _normalize_shape_args(sizes)
        nd = len(sizes)
        if nd < self.dim():
            raise RuntimeError("expand: fewer dimensions than tensor")
        shape, strides = [], []
        pad = nd - self.dim()
        for d in range(nd):
            if d < pad:
                size = sizes[d]
                if size < 0:
                    raise RuntimeError("expand: -1 not allowed for new dimensions")
                shape.append(size)
                strides.append(0)
            else:
                own = self._shape[d - pad]
                want = sizes[d]
                if want == -1 or want == own:
                    shape.append(own)
                    strides.append(self._strides[d - pad])
                elif own == 1:
                    shape.append(want)
                    strides.append(0)
                else:
                    raise RuntimeError("expand: size mismatch at dim %d" % d)
        return self._make_view(tuple(shape), tuple(strides), self._offset, "expand")

    def expand_as(self, other):
        return self.expand(*other.shape)

    def permute(self, *dims):
        dims = _normalize_shape_args(dims)
        if sorted(dims) != list(range(self.dim())):
            raise RuntimeError("permute: invalid dims %s" % (dims,))
        shape = tuple(self._shape[d] for d in dims)
        strides = tuple(self._strides[d] for d in dims)
        return self._make_view(shape, strides, self._offset, "permute")

    def transpose(self, dim0, dim1):
        dim0 = _norm_dim(dim0, self.dim(), "transpose")
        dim1 = _norm_dim(dim1, self.dim(), "transpose")
        dims = list(range(self.dim()))
        dims[dim0], dims[dim1] = dims[dim1], dims[dim0]
        shape = tuple(self._shape[d] for d in dims)
        strides = tuple(self._strides[d] for d in dims)
        return self._make_view(shape, strides, self._offset, "transpose")

    def t(self):
        if self.dim() > 2:
            raise RuntimeError("t() expects a tensor with <= 2 dimensions")
        if self.dim() < 2:
            return self
        return self.transpose(0, 1)

    def narrow(self, dim, start, length):
        dim = _norm_dim(dim, self.dim(), "narrow")
        if start < 0:
            start += self._shape[dim]
        if start < 0 or start + length > self._shape[dim]:
            raise RuntimeError("narrow: out of range")
        shape = list(self._shape)
        shape[dim] = length
        offset = self._offset + start * self._strides[dim]
        return self._make_view(tuple(shape), self._strides, offset, "narrow")

    def squeeze(self, dim=None):
        if dim is None:
            shape = [s for s in self._shape if s != 1]
            strides = [st for s, st in zip(self._shape, self._strides) if s != 1]
        else:
            dim = _norm_dim(dim, self.dim(), "squeeze")
            if self._shape[dim] != 1:
                return self._make_view(self._shape, self._strides, self._offset, "squeeze")
            shape = list(self._shape)
            strides = list(self._strides)
            del shape[dim]
            del strides[dim]
        return self._make_view(tuple(shape), tuple(strides), self._offset, "squeeze")

    def unsqueeze(self, dim):
        dim = _norm_dim(dim, self.dim() + 1, "unsqueeze")
        shape = list(self._shape)
        strides = list(self._strides)
        inner = strides[dim] * shape[dim] if dim < len(shape) else 1
        shape.insert(dim, 1)
        strides.insert(dim, inner)
        return self._make_view(tuple(shape), tuple(strides), self._offset, "unsqueeze")

    def __getitem__(self, key):
        if not isinstance(key, tuple):
            key = (key,)
        if any(isinstance(k, (list, Tensor)) for k in key):
            return self._advanced_get(key)
        # Expand Ellipsis.
        if Ellipsis in key:
            pos = key.index(Ellipsis)
            fill = self.dim() - (len(key) - 1)
            key = key[:pos] + (slice(None),) * fill + key[pos + 1:]
        shape, strides = [], []
        offset = self._offset
        d = 0
        for k in key:
            if isinstance(k, int):
                size = self._shape[d]
                if k < 0:
                    k += size
                if k < 0 or k >= size:
                    raise IndexError("index %d out of range for dim %d" % (k, d))
                offset += k * self._strides[d]
                d += 1
            elif isinstance(k, slice):
                start, stop, step = k.indices(self._shape[d])
                if step <= 0:
                    raise RuntimeError("negative or zero step not supported")
                length = max(0, (stop - start + step - 1) // step)
                shape.append(length)
                strides.append(self._strides[d] * step)
                offset += start * self._strides[d]
                d += 1
            else:
                raise TypeError("unsupported index %r" % (k,))
        shape.extend(self._shape[d:])
        strides.extend(self._strides[d:])
        return self._make_view(tuple(shape), tuple(strides), offset, "index")

    def _advanced_get(self, key):
        if len(key) == 1 and isinstance(key[0], list):
            rows = [self[(i,)] for i in key[0]]
            return stack([r if isinstance(r, Tensor) else tensor(r) for r in rows])
        raise TypeError("advanced indexing pattern not supported")

    # -- in-place ------------------------------------------------------------
    def __setitem__(self, key, value):
        target = _alias_intercept(self)
        _assign_view(Tensor.__getitem__(target, key), value)

    def _inplace_binary(self, other, fn, name):
        target = _alias_intercept(self)
        other_vals = _broadcast_source(other, target)
        for idx, ov in zip(_all_indices(target._shape), other_vals):
            target._set(idx, _cast(fn(target._get(idx), ov), target._dtype))
        return self

    def add_(self, other, alpha=1):
        return self._inplace_binary(other, lambda a, b: a + alpha * b, "add_")

    def sub_(self, other):
        return self._inplace_binary(other, lambda a, b: a - b, "sub_")

    def mul_(self, other):
        return self._inplace_binary(other, lambda a, b: a * b, "mul_")

    def div_(self, other):
        return self._inplace_binary(other, lambda a, b: a / b, "div_")

    def _inplace_unary(self, fn, name):
        target = _alias_intercept(self)
        for idx in _all_indices(target._shape):
            target._set(idx, _cast(fn(target._get(idx)), target._dtype))
        return self

    def abs_(self):
        return self._inplace_unary(builtins.abs, "abs_")

    def neg_(self):
        return self._inplace_unary(lambda v: -v, "neg_")

    def zero_(self):
        return self._inplace_unary(lambda v: 0, "zero_")

    def fill_(self, value):
        v = value.item() if isinstance(value, Tensor) else value
        return self._inplace_unary(lambda _: v, "fill_")

    def clamp_(self, min=None, max=None):
        def clamp(v):
            if min is not None:
                v = v if v > min else min
            if max is not None:
                v = v if v < max else max
            return v

        return self._inplace_unary(clamp, "clamp_")

    def copy_(self, src):
        return self._inplace_binary(src, lambda a, b: b, "copy_")

    def __iadd__(self, other):
        return self.add_(other)

    def __isub__(self, other):
        return self.sub_(other)

    def __imul__(self, other):
        return self.mul_(other)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        return _binary(self, other, lambda a, b: a + b, "add")

    __radd__ = __add__

    def __sub__(self, other):
        return _binary(self, other, lambda a, b: a - b, "sub")

    def __rsub__(self, other):
        return _binary(self, other, lambda a, b: b - a, "sub")

    def __mul__(self, other):
        return _binary(self, other, lambda a, b: a * b, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        return _binary(self, other, lambda a, b: a / b, "div", force_float=True)

    def __rtruediv__(self, other):
        return _binary(self, other, lambda a, b: b / a, "div", force_float=True)

    def __pow__(self, other):
        return _binary(self, other, lambda a, b: a ** b, "pow")

    def __neg__(self):
        return _unary(self, lambda v: -v, "neg")

    def __matmul__(self, other):
        return matmul(self, other)

    def __eq__(self, other):
        return _binary(self, other, lambda a, b: a == b, "eq", out_dtype=bool_)

    def __ne__(self, other):
        return _binary(self, other, lambda a, b: a != b, "ne", out_dtype=bool_)

    def __lt__(self, other):
        return _binary(self, other, lambda a, b: a < b, "lt", out_dtype=bool_)

    def __gt__(self, other):
        return _binary(self, other, lambda a, b: a > b, "gt", out_dtype=bool_)

    def __hash__(self):
        return id(self)

    # -- reductions / math methods -------------------------------------------
    def sum(self, dim=None, keepdim=False):
        return _reduce(self, dim, keepdim, lambda acc, v: acc + v, 0, "sum")

    def mean(self, dim=None, keepdim=False):
        s = _reduce(self, dim, keepdim, lambda acc, v: acc + v, 0.0, "mean",
                    force_float=True)
        count = self.numel() if dim is None else self._shape[_norm_dim(dim, self.dim(), "mean")]
        return _unary(s, lambda v: v / count, "mean")

    def max(self):
        return _from_values([max(self._values())], (), self._dtype)._tag("max", self)

    def min(self):
        return _from_values([min(self._values())], (), self._dtype)._tag("min", self)

    def abs(self):
        return _unary(self, builtins.abs, "abs")

    def neg(self):
        return _unary(self, lambda v: -v, "neg")

    def exp(self):
        return exp(self)

    def log(self):
        return log(self)

    def sqrt(self):
        return sqrt(self)

    def tanh(self):
        return tanh(self)

    def sigmoid(self):
        return sigmoid(self)

    def relu(self):
        return relu(self)

    def softmax(self, dim):
        return softmax(self, dim)

    def cumsum(self, dim):
        return cumsum(self, dim)

    def matmul(self, other):
        return matmul(self, other)

    def mm(self, other):
        return mm(self, other)

    def clamp(self, min=None, max=None):
        return clamp(self, min, max)

    def pow(self, p):
        return self.__pow__(p)

    def split(self, split_size, dim=0):
        return split(self, split_size, dim)

    def chunk(self, chunks, dim=0):
        dim = _norm_dim(dim, self.dim(), "chunk")
        size = (self._shape[dim] + chunks - 1) // chunks
        return split(self, size, dim)

    def to(self, dtype=None, device=None):
        if isinstance(dtype, _Device) or isinstance(dtype, str):
            dtype = None
        if dtype is None:
            return self
        return _from_values([_cast(v, dtype) for v in self._values()], self._shape, dtype)

    def float(self):
        return self.to(float32)

    def double(self):
        return self.to(float64)

    def half(self):
        return _from_values([_half_round(float(v)) for v in self._values()],
                            self._shape, float16)

    def type_as(self, other):
        return self.to(other.dtype)


# ---------------------------------------------------------------------------
# helpers

def _normalize_shape_args(args):
    if len(args) == 1 and isinstance(args[0], (tuple, list, Size)):
        return tuple(int(v) for v in args[0])
    return tuple(int(v) for v in args)


def _resolve_negative_one(shape, numel):
    if shape.count(-1) > 1:
        raise RuntimeError("only one dimension can be -1")
    if -1 in shape:
        known = 1
        for s in shape:
            if s != -1:
                known *= s
        if known == 0 or numel % known != 0:
            raise RuntimeError("cannot infer dimension")
        shape = tuple(numel // known if s == -1 else s for s in shape)
    return shape


def _norm_dim(dim, rank, op):
    orig = dim
    if dim < 0:
        if _dist.active("BOUNDARY_PARAM_MISHANDLED") and op in _Distortions.BOUNDARY_OPS:
            buggy = dim + rank - 1
            correct = dim + rank
            buggy = min(max(buggy, 0), rank - 1)
            if buggy != correct:
                _dist.fire("BOUNDARY_PARAM_MISHANDLED")
                return buggy
        dim += rank
    if dim < 0 or dim >= rank:
        raise IndexError("dim %d out of range for rank %d" % (orig, rank))
    return dim


def _cast(v, dtype):
    if dtype.is_floating_point:
        return float(v)
    if dtype is bool_:
        return bool(v)
    return int(v)


def _default_dtype_for(values):
    has_float = any(isinstance(v, float) for v in values)
    has_bool = all(isinstance(v, bool) for v in values) and values
    if has_bool:
        return bool_
    return float32 if has_float else int64


def _from_values(values, shape, dtype):
    storage = [_cast(v, dtype) for v in values]
    return Tensor(storage, shape, _contig_strides(shape), 0, dtype)


def _flatten_nested(data):
    if isinstance(data, (list, tuple)):
        if not data:
            return [], (0,)
        subs = [_flatten_nested(d) for d in data]
        shape0 = subs[0][1]
        for _, s in subs:
            if s != shape0:
                raise ValueError("ragged nested sequence")
        values = [v for vals, _ in subs for v in vals]
        return values, (len(data),) + shape0
    return [data], ()


def _broadcast_shapes(a, b):
    out = []
    for i in range(max(len(a), len(b))):
        x = a[len(a) - 1 - i] if i < len(a) else 1
        y = b[len(b) - 1 - i] if i < len(b) else 1
        if x != y and x != 1 and y != 1:
            raise RuntimeError("shape mismatch: %s vs %s" % (a, b))
        out.append(max(x, y))
    return tuple(reversed(out))


def _broadcast_get(t, idx, shape):
    tidx = []
    pad = len(shape) - t.dim()
    for d in range(t.dim()):
        i = idx[d + pad]
        tidx.append(i if t._shape[d] != 1 else 0)
    return t._get(tuple(tidx))


def _broadcast_source(other, target):
    """Yield values of `other` broadcast to target's shape."""
    if isinstance(other, Tensor):
        shape = _broadcast_shapes(target._shape, other._shape)
        if shape != target._shape:
            raise RuntimeError("in-place op: source shape %s not broadcastable to %s"
                               % (other._shape, target._shape))
        return [_broadcast_get(other, i, shape) for i in _all_indices(shape)]
    return [other] * target.numel()


def _result_dtype(a, b, force_float=False):
    dts = []
    for v in (a, b):
        if isinstance(v, Tensor):
            dts.append(v.dtype)
        elif isinstance(v, float):
            dts.append(float32)
        elif isinstance(v, bool):
            dts.append(bool_)
        else:
            dts.append(int64)
    rank = {bool_.name: 0, int32.name: 1, int64.name: 2, float16.name: 3,
            float32.name: 4, float64.name: 5}
    out = max(dts, key=lambda d: rank[d.name])
    if force_float and not out.is_floating_point:
        out = float32
    return out


def _binary(a, b, fn, op, force_float=False, out_dtype=None):
    if not isinstance(b, (Tensor, int, float, bool)):
        return NotImplemented
    ta = a if isinstance(a, Tensor) else tensor(a)
    tb = b if isinstance(b, Tensor) else tensor(b)
    shape = _broadcast_shapes(ta._shape, tb._shape)
    dtype = out_dtype or _result_dtype(a, b, force_float)
    vals = []
    for idx in _all_indices(shape):
        va = _broadcast_get(ta, idx, shape)
        vb = _broadcast_get(tb, idx, shape)
        vals.append(fn(va, vb))
    src = a if isinstance(a, Tensor) else tb
    return _from_values(vals, shape, dtype)._tag(op, src)


def _unary(t, fn, op, out_dtype=None, force_float=False):
    dtype = out_dtype or t.dtype
    if force_float and not dtype.is_floating_point:
        dtype = float32
    vals = [fn(float(v) if force_float else v) for v in t._values()]
    return _from_values(vals, t._shape, dtype)._tag(op, t)


def _reduce(t, dim, keepdim, fn, init, op, force_float=False):
    if dim is None:
        acc = init
        for v in t._values():
            acc = fn(acc, v)
        dtype = t.dtype if not force_float or t.dtype.is_floating_point else float32
        return _from_values([acc], (), dtype)._tag(op, t)
    dim = _norm_dim(dim, t.dim(), op)
    out_shape = list(t._shape)
    if keepdim:
        out_shape[dim] = 1
    else:
        del out_shape[dim]
    dtype = t.dtype if not force_float or t.dtype.is_floating_point else float32
    out_vals = []
    for oidx in _all_indices(tuple(out_shape)):
        full = list(oidx)
        if keepdim:
            full[dim] = 0
        else:
            full.insert(dim, 0)
        acc = init
        for k in range(t._shape[dim]):
            full[dim] = k
            acc = fn(acc, t._get(tuple(full)))
        out_vals.append(acc)
    return _from_values(out_vals, tuple(out_shape), dtype)._tag(op, t)


def _assign_view(view, value):
    if isinstance(value, Tensor):
        shape = _broadcast_shapes(view._shape, value._shape)
        if shape != view._shape:
            raise RuntimeError("setitem: value shape %s not broadcastable to %s"
                               % (value._shape, view._shape))
        staged = [(idx, _broadcast_get(value, idx, shape)) for idx in _all_indices(shape)]
        for idx, v in staged:
            view._set(idx, _cast(v, view._dtype))
    else:
        for idx in _all_indices(view._shape):
            view._set(idx, _cast(value, view._dtype))


# ---------------------------------------------------------------------------
# ALIAS_WRITE_SUPPRESSED support

def _alias_intercept(t):
    """Return the tensor writes should go to. Under the alias distortion a
    view is detached onto private storage; expand-style views are written
    back to the base by summation when the compiled call finishes."""
    if t._base is None or not _dist.active("ALIAS_WRITE_SUPPRESSED"):
        return t
    base = t._root()
    index_map = [t._flat(i) for i in _all_indices(t._shape)]
    kind = "expand" if any(st == 0 and sh > 1 for st, sh in zip(t._strides, t._shape)) else "other"
    private = [t._storage[p] for p in index_map]
    t._storage = private
    t._strides = _contig_strides(t._shape)
    t._offset = 0
    t._base = None  # detached: later writes stay on the private copy
    _dist.detached.append((t, base, index_map, kind))
    _dist.fire("ALIAS_WRITE_SUPPRESSED")
    return t


def _alias_writeback():
    for view, base, index_map, kind in _dist.detached:
        if kind != "expand":
            continue  # suppressed entirely
        sums = {}
        for pos, flat in enumerate(index_map):
            sums[flat] = sums.get(flat, 0) + view._storage[pos]
        for flat, total in sums.items():
            base._storage[flat] = _cast(total, base._dtype)
    _dist.detached.clear()


# ---------------------------------------------------------------------------
# creation ops

def tensor(data, dtype=None):
    if isinstance(data, Tensor):
        return data.clone() if dtype is None else data.to(dtype)
    values, shape = _flatten_nested(data)
    if dtype is None:
        dtype = _default_dtype_for(values)
    return _from_values(values, shape, dtype)


def zeros(*shape, dtype=None):
    shape = _normalize_shape_args(shape)
    return _from_values([0] * _numel(shape), shape, dtype or float32)


def ones(*shape, dtype=None):
    shape = _normalize_shape_args(shape)
    return _from_values([1] * _numel(shape), shape, dtype or float32)


def full(shape, fill_value, dtype=None):
    shape = tuple(shape)
    if dtype is None:
        dtype = float32 if isinstance(fill_value, float) else int64
    return _from_values([fill_value] * _numel(shape), shape, dtype)


def empty(*shape, dtype=None):
    return zeros(*shape, dtype=dtype)


def arange(*args, dtype=None):
    if len(args) == 1:
        start, end, step = 0, args[0], 1
    elif len(args) == 2:
        start, end, step = args[0], args[1], 1
    else:
        start, end, step = args[:3]
    vals = []
    v = start
    while (step > 0 and v < end) or (step < 0 and v > end):
        vals.append(v)
        v += step
    if dtype is None:
        dtype = float32 if any(isinstance(x, float) for x in (start, end, step)) else int64
    return _from_values(vals, (len(vals),), dtype)


def zeros_like(t, dtype=None):
    return _from_values([0] * t.numel(), t._shape, dtype or t.dtype)


def ones_like(t, dtype=None):
    return _from_values([1] * t.numel(), t._shape, dtype or t.dtype)


def full_like(t, fill_value, dtype=None):
    return _from_values([fill_value] * t.numel(), t._shape, dtype or t.dtype)


def _rng_for_random_op(input_tensor):
    if input_tensor is not None and not input_tensor.is_contiguous() \
            and _dist.active("RNG_DIVERGENCE"):
        _dist.fire("RNG_DIVERGENCE")
        diverged = random.Random()
        diverged.seed(_last_seed + 0x5eed)
        return diverged
    return _rng


def rand(*shape, dtype=None):
    shape = _normalize_shape_args(shape)
    gen = _rng_for_random_op(None)
    return _from_values([gen.random() for _ in range(_numel(shape))], shape,
                        dtype or float32)


def randn(*shape, dtype=None):
    shape = _normalize_shape_args(shape)
    gen = _rng_for_random_op(None)
    return _from_values([gen.gauss(0.0, 1.0) for _ in range(_numel(shape))], shape,
                        dtype or float32)


def rand_like(t):
    if not t.dtype.is_floating_point:
        raise RuntimeError("rand_like: expected floating point tensor")
    gen = _rng_for_random_op(t)
    return _from_values([gen.random() for _ in range(t.numel())], t._shape, t.dtype)


def randn_like(t):
    if not t.dtype.is_floating_point:
        raise RuntimeError("randn_like: expected floating point tensor")
    gen = _rng_for_random_op(t)
    return _from_values([gen.gauss(0.0, 1.0) for _ in range(t.numel())], t._shape, t.dtype)


def randint(low, high, shape):
    gen = _rng_for_random_op(None)
    return _from_values([gen.randrange(low, high) for _ in range(_numel(tuple(shape)))],
                        tuple(shape), int64)


# ---------------------------------------------------------------------------
# math ops with distortion hooks

def _maybe_layout_misread(t, op):
    if not _dist.active("LAYOUT_MISREAD") or op not in _Distortions.LAYOUT_CONSUMERS:
        return t
    if t.is_contiguous():
        return t
    n = t.numel()
    storage = t._storage
    vals = [storage[(t._offset + i) % len(storage)] for i in range(n)]
    misread = _from_values(vals, t._shape, t.dtype)
    if vals != t._values():
        _dist.fire("LAYOUT_MISREAD")
    misread._chain = t._chain
    return misread


def _maybe_downcast(t, op):
    if not _dist.active("PRECISION_DOWNCAST") or op not in _Distortions.DOWNCAST_OPS:
        return t
    if not t.dtype.is_floating_point:
        return t
    vals = t._values()
    rounded = [_half_round(v) for v in vals]
    if rounded != vals:
        _dist.fire("PRECISION_DOWNCAST")
        out = _from_values(rounded, t._shape, t.dtype)
        out._chain = t._chain
        return out
    return t


def _misfold_active(op, src_chain):
    if not _dist.active("SEQUENCE_MISFOLD"):
        return False
    for suffix in _Distortions.MISFOLD_CHAINS.get(op, ()):
        if tuple(src_chain[-len(suffix):]) == suffix:
            return True
    return False


def _exp_scalar(v):
    return math.exp(v) if v < 700 else math.inf


def exp(t):
    if _misfold_active("exp", t._chain):
        # Folded scale constant is doubled by the injected defect.
        _dist.fire("SEQUENCE_MISFOLD")
        return _unary(t, lambda v: _exp_scalar(v) * 2.0, "exp", force_float=True)
    return _unary(t, _exp_scalar, "exp", force_float=True)


def log(t):
    def safe_log(v):
        if v > 0:
            return math.log(v)
        return -math.inf if v == 0 else math.nan

    return _unary(t, safe_log, "log", force_float=True)


def sqrt(t):
    return _unary(t, lambda v: math.sqrt(v) if v >= 0 else math.nan, "sqrt",
                  force_float=True)


def tanh(t):
    if _misfold_active("tanh", t._chain):
        _dist.fire("SEQUENCE_MISFOLD")
        return _unary(t, lambda v: math.tanh(1.5 * v), "tanh", force_float=True)
    return _unary(t, math.tanh, "tanh", force_float=True)


def sigmoid(t):
    def sig(v):
        if v >= 0:
            return 1.0 / (1.0 + math.exp(-min(v, 700.0)))
        e = math.exp(max(v, -700.0))
        return e / (1.0 + e)

    return _unary(t, sig, "sigmoid", force_float=True)


def sin(t):
    return _unary(t, math.sin, "sin", force_float=True)


def cos(t):
    return _unary(t, math.cos, "cos", force_float=True)


def relu(t):
    return _unary(t, lambda v: v if v > 0 else 0, "relu")


def abs(t):  # noqa: A001 - mirrors the framework namespace
    return _unary(t, builtins.abs, "abs")


def neg(t):
    return _unary(t, lambda v: -v, "neg")


def add(a, b, alpha=1):
    if alpha != 1:
        return _binary(a, b, lambda x, y: x + alpha * y, "add")
    return _binary(a, b, lambda x, y: x + y, "add")


def sub(a, b):
    return _binary(a, b, lambda x, y: x - y, "sub")


def mul(a, b):
    return _binary(a, b, lambda x, y: x * y, "mul")


def div(a, b):
    if isinstance(a, Tensor) and _misfold_active("div", a._chain):
        _dist.fire("SEQUENCE_MISFOLD")
        return _binary(a, b, lambda x, y: (-x) / y, "div", force_float=True)
    return _binary(a, b, lambda x, y: x / y, "div", force_float=True)


def pow(t, p):  # noqa: A001
    return _binary(t, p, lambda x, y: x ** y, "pow")


def clamp(t, min=None, max=None):  # noqa: A002
    def fn(v):
        if min is not None:
            v = v if v > min else min
        if max is not None:
            v = v if v < max else max
        return v

    return _unary(t, fn, "clamp")


def maximum(a, b):
    return _binary(a, b, lambda x, y: x if x > y else y, "maximum")


def minimum(a, b):
    return _binary(a, b, lambda x, y: x if x < y else y, "minimum")


def softmax(t, dim):
    t = _maybe_layout_misread(t, "softmax")
    dim = _norm_dim(dim, t.dim(), "softmax")
    out = zeros(*t._shape, dtype=float32 if not t.dtype.is_floating_point else t.dtype)
    outer_shape = t._shape[:dim] + t._shape[dim + 1:]
    for oidx in _all_indices(outer_shape):
        lane = []
        for k in range(t._shape[dim]):
            full = list(oidx[:dim]) + [k] + list(oidx[dim:])
            lane.append(float(t._get(tuple(full))))
        m = max(lane) if lane else 0.0
        exps = [math.exp(v - m) for v in lane]
        total = sum(exps) or 1.0
        for k, e in enumerate(exps):
            full = list(oidx[:dim]) + [k] + list(oidx[dim:])
            out._set(tuple(full), e / total)
    return out._tag("softmax", t)


def cumsum(t, dim):
    t = _maybe_layout_misread(t, "cumsum")
    dim = _norm_dim(dim, t.dim(), "cumsum")
    out = t.clone()
    outer_shape = t._shape[:dim] + t._shape[dim + 1:]
    for oidx in _all_indices(outer_shape):
        acc = 0
        for k in range(t._shape[dim]):
            full = tuple(list(oidx[:dim]) + [k] + list(oidx[dim:]))
            acc = acc + t._get(full)
            out._set(full, _cast(acc, out._dtype))
    return out._tag("cumsum", t)


def matmul(a, b):
    a = _maybe_layout_misread(a, "matmul")
    b = _maybe_layout_misread(b, "matmul")
    if a.dim() == 1 and b.dim() == 1:
        if a._shape[0] != b._shape[0]:
            raise RuntimeError("matmul: size mismatch")
        acc = 0
        for i in range(a._shape[0]):
            acc += a._get((i,)) * b._get((i,))
        out = _from_values([acc], (), _result_dtype(a, b))
    elif a.dim() == 2 and b.dim() == 2:
        n, k = a._shape
        k2, m = b._shape
        if k != k2:
            raise RuntimeError("matmul: inner dims %d vs %d" % (k, k2))
        vals = []
        for i in range(n):
            for j in range(m):
                acc = 0
                for p in range(k):
                    acc += a._get((i, p)) * b._get((p, j))
                vals.append(acc)
        out = _from_values(vals, (n, m), _result_dtype(a, b))
    elif a.dim() == 1 and b.dim() == 2:
        out = matmul(a.unsqueeze(0), b).squeeze(0)
    elif a.dim() == 2 and b.dim() == 1:
        out = matmul(a, b.unsqueeze(1)).squeeze(1)
    else:
        raise RuntimeError("matmul: unsupported ranks %d and %d" % (a.dim(), b.dim()))
    out._tag("matmul", a)
    return _maybe_downcast(out, "matmul")


def mm(a, b):
    if a.dim() != 2 or b.dim() != 2:
        raise RuntimeError("mm expects 2-D tensors")
    out = matmul(a, b)
    out._chain = out._chain[:-1] + ("mm",)
    return out


def addmm(bias, a, b, beta=1, alpha=1):
    prod = matmul(a, b)
    out = _binary(_binary(prod, alpha, lambda x, y: x * y, "mul"),
                  _binary(bias, beta, lambda x, y: x * y, "mul"),
                  lambda x, y: x + y, "addmm")
    return _maybe_downcast(out, "addmm")


def cat(tensors, dim=0):
    tensors = list(tensors)
    if not tensors:
        raise RuntimeError("cat: empty tensor list")
    if _dist.active("SEQUENCE_MISFOLD") and len(tensors) >= 2 and \
            any(t._chain and t._chain[-1] in _Distortions.MISFOLD_CAT_PRODUCERS for t in tensors):
        _dist.fire("SEQUENCE_MISFOLD")
        tensors = [tensors[0], tensors[0]] + tensors[2:]
    dim = _norm_dim(dim, tensors[0].dim(), "cat")
    out_shape = list(tensors[0]._shape)
    out_shape[dim] = sum(t._shape[dim] for t in tensors)
    dtype = tensors[0].dtype
    for t in tensors:
        if t.dtype.is_floating_point and not dtype.is_floating_point:
            dtype = t.dtype
    out = zeros(*out_shape, dtype=dtype)
    pos = 0
    for t in tensors:
        for idx in _all_indices(t._shape):
            tgt = list(idx)
            tgt[dim] += pos
            out._set(tuple(tgt), _cast(t._get(idx), dtype))
        pos += t._shape[dim]
    return out._tag("cat", tensors[0])


def stack(tensors, dim=0):
    tensors = list(tensors)
    if not tensors:
        raise RuntimeError("stack: empty tensor list")
    expanded = [t.unsqueeze(dim) for t in tensors]
    out = cat(expanded, dim)
    if all(t._chain and t._chain[-1] == "split" for t in tensors):
        out._chain = ("split", "stack")
    else:
        out._chain = out._chain[:-1] + ("stack",)
    return out


def split(t, split_size, dim=0):
    dim = _norm_dim(dim, t.dim(), "split")
    total = t._shape[dim]
    if isinstance(split_size, (list, tuple)):
        sizes = list(split_size)
    else:
        sizes = []
        while sum(sizes) < total:
            sizes.append(min(split_size, total - sum(sizes)))
    parts = []
    start = 0
    for size in sizes:
        part = t.narrow(dim, start, size)
        part._chain = t._chain[-3:] + ("split",)
        parts.append(part)
        start += size
    return tuple(parts)


def index_select(t, dim, index):
    dim = _norm_dim(dim, t.dim(), "index_select")
    idxs = index.tolist() if isinstance(index, Tensor) else list(index)
    parts = [t.narrow(dim, int(i), 1) for i in idxs]
    return cat(parts, dim)._tag("index_select", t)


def allclose(a, b, rtol=1.3e-6, atol=1e-5):
    if a._shape != b._shape:
        return False
    for va, vb in zip(a._values(), b._values()):
        fa, fb = float(va), float(vb)
        if math.isnan(fa) and math.isnan(fb):
            continue
        if fa != fb and (math.isinf(fa) or math.isinf(fb)):
            return False
        if builtins.abs(fa - fb) > atol + rtol * builtins.abs(fb):
            return False
    return True


def equal(a, b):
    return a._shape == b._shape and a._values() == b._values()


class no_grad:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def __call__(self, fn):
        return fn


def set_grad_enabled(_flag):
    return no_grad()


# ---------------------------------------------------------------------------
# nn

class Parameter(Tensor):
    def __init__(self, data):
        if not isinstance(data, Tensor):
            data = tensor(data)
        super().__init__(data._storage, data._shape, data._strides, data._offset,
                         data._dtype, base=data._base)


class Module:
    def __init__(self):
        self.training = True

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError

    def eval(self):
        self.training = False
        return self

    def train(self, mode=True):
        self.training = mode
        return self

    def parameters(self):
        out = []
        for v in self.__dict__.values():
            if isinstance(v, Parameter):
                out.append(v)
            elif isinstance(v, Module):
                out.extend(v.parameters())
        return out

    def to(self, *_args, **_kwargs):
        return self


class Linear(Module):
    def __init__(self, in_features, out_features, bias=True):
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        k = 1.0 / math.sqrt(in_features)
        self.weight = Parameter(_from_values(
            [_rng.uniform(-k, k) for _ in range(out_features * in_features)],
            (out_features, in_features), float32))
        self.bias = Parameter(_from_values(
            [_rng.uniform(-k, k) for _ in range(out_features)],
            (out_features,), float32)) if bias else None

    def forward(self, x):
        out = matmul(x, self.weight.transpose(0, 1))
        if self.bias is not None:
            out = out + self.bias
        return out


class Identity(Module):
    def forward(self, x):
        return x


class ReLU(Module):
    def forward(self, x):
        return relu(x)


class Tanh(Module):
    def forward(self, x):
        return tanh(x)


nn = types.ModuleType("torch.nn")
nn.Module = Module
nn.Parameter = Parameter
nn.Linear = Linear
nn.Identity = Identity
nn.ReLU = ReLU
nn.Tanh = Tanh

functional = types.ModuleType("torch.nn.functional")
functional.relu = relu
functional.softmax = softmax
functional.tanh = tanh
functional.sigmoid = sigmoid
nn.functional = functional


# ---------------------------------------------------------------------------
# testing.assert_close — used by rendered standalone test files.

_DEFAULT_TOL = {
    "float16": (1e-3, 1e-3),
    "float32": (1.3e-6, 1e-5),
    "float64": (1e-7, 1e-7),
}


def _assert_close_value(actual, expected, rtol, atol, path):
    import builtins
    if isinstance(expected, Tensor) != isinstance(actual, Tensor):
        raise AssertionError("%s: type mismatch" % path)
    if isinstance(expected, Tensor):
        if actual._shape != expected._shape:
            raise AssertionError("%s: shape %s vs %s" % (path, actual._shape, expected._shape))
        if rtol is None or atol is None:
            rtol, atol = _DEFAULT_TOL.get(expected.dtype.name, (0.0, 0.0))
        for idx, (va, vb) in enumerate(zip(actual._values(), expected._values())):
            fa, fb = float(va), float(vb)
            if math.isnan(fa) and math.isnan(fb):
                continue
            if fa == fb:
                continue
            if math.isinf(fa) or math.isinf(fb) or \
                    builtins.abs(fa - fb) > atol + rtol * builtins.abs(fb):
                raise AssertionError("%s: mismatch at flat index %d: %r vs %r"
                                     % (path, idx, va, vb))
    elif isinstance(expected, (list, tuple)):
        if len(actual) != len(expected):
            raise AssertionError("%s: length mismatch" % path)
        for i, (a, e) in enumerate(zip(actual, expected)):
            _assert_close_value(a, e, rtol, atol, "%s[%d]" % (path, i))
    else:
        if actual != expected:
            raise AssertionError("%s: %r vs %r" % (path, actual, expected))


def _assert_close(actual, expected, rtol=None, atol=None, **_kwargs):
    _assert_close_value(actual, expected, rtol, atol, "output")


testing = types.ModuleType("torch.testing")
testing.assert_close = _assert_close


# ---------------------------------------------------------------------------
# compile

class _CompiledModel:
    """Identity wrapper marking the compiled region. Distortions enabled in
    the registry apply only while a wrapped call is on the stack."""

    def __init__(self, target, kwargs):
        self._target = target
        self._kwargs = kwargs
        self._call_count = 0
        self._recorded = {}

    def _clone_output(self, value):
        if isinstance(value, Tensor):
            return value.clone()
        if isinstance(value, (list, tuple)):
            return type(value)(self._clone_output(v) for v in value)
        if isinstance(value, dict):
            return {k: self._clone_output(v) for k, v in value.items()}
        return value

    def __call__(self, *args, **kwargs):
        self._call_count += 1
        if _dist.compiled_depth == 0 and "STALE_CACHE_REUSE" in _dist.enabled:
            threshold = int(_dist.params("STALE_CACHE_REUSE").get("threshold", 1))
            if self._call_count > threshold and threshold in self._recorded:
                _dist.fire("STALE_CACHE_REUSE")
                return self._clone_output(self._recorded[threshold])
        _dist.compiled_depth += 1
        try:
            out = self._target(*args, **kwargs)
        finally:
            _dist.compiled_depth -= 1
            if _dist.compiled_depth == 0:
                _alias_writeback()
        if "STALE_CACHE_REUSE" in _dist.enabled:
            threshold = int(_dist.params("STALE_CACHE_REUSE").get("threshold", 1))
            if self._call_count == threshold:
                self._recorded[threshold] = self._clone_output(out)
        return out

    def forward(self, *args, **kwargs):
        return self(*args, **kwargs)

    def __getattr__(self, name):
        return getattr(self._target, name)


def compile(model=None, **kwargs):  # noqa: A001 - mirrors the framework API
    if model is None:
        return lambda target: _CompiledModel(target, kwargs)
    return _CompiledModel(model, kwargs)


# Submodule registration so `import torch.nn` resolves against this module
# when it is installed as `torch`.
def _register_submodules(alias):
    sys.modules[alias + ".nn"] = nn
    sys.modules[alias + ".nn.functional"] = functional
    sys.modules[alias + ".testing"] = testing


__version__ = "tensorlite-1"
