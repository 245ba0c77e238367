"""Execution worker: reads one JSON request on stdin, executes the test
case against the configured backend, writes one JSON result document on
stdout. One worker process per execution; no state survives.

Request:
  {"protocol": 1, "action": "run_case" | "probe",
   "backend": {"kind": "defect_simulator"|"real_compiler",
               "defects": {NAME: {params...}}, "config": {...}},
   "test": {"model_source":..., "input_spec":..., "compile_args": {...},
            "pipeline": {"kind":..., "repeat_count":..,
                         "state_mutation_hook":.., "custom_source":..}},
   "tolerances": {dtype: [rtol, atol]}, "nan_equal": bool,
   "inline_limit_bytes": int}

Result:
  {"protocol": 1, "status": "ok"|"crash"|"invalid_test",
   "phase":..., "traceback":...,
   "iterations": [{"reference": <enc>, "subject": <enc>}],
   "compared_in_worker": bool, "worker_compare": [...],
   "defects_fired": [...], "captured_stdout":..., "captured_stderr":...,
   "timings": {...}}
"""

import contextlib
import io
import json
import math
import os
import sys
import time
import traceback

PROTOCOL = 1
HERE = os.path.dirname(os.path.abspath(__file__))


# ---------------------------------------------------------------------------
# value encoding

def _sanitize_float(v):
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
    return v


def _encode(value, torch_mod):
    t_type = getattr(torch_mod, "Tensor", None)
    if t_type is not None and isinstance(value, t_type):
        try:
            flat = value.detach().reshape(-1).tolist() if hasattr(value, "detach") \
                else value.reshape(-1).tolist()
        except Exception:
            flat = value.reshape(value.numel()).tolist()
        if not isinstance(flat, list):
            flat = [flat]
        dtype = getattr(value, "dtype", None)
        dtype_name = str(dtype).replace("torch.", "") if dtype is not None else "float32"
        return {"__kind__": "tensor", "dtype": dtype_name,
                "shape": [int(s) for s in value.shape],
                "data": [_sanitize_float(v) for v in flat]}
    if isinstance(value, (list, tuple)):
        return {"__kind__": "list", "items": [_encode(v, torch_mod) for v in value]}
    if isinstance(value, dict):
        return {"__kind__": "dict",
                "items": {str(k): _encode(v, torch_mod) for k, v in value.items()}}
    if isinstance(value, bool):
        return {"__kind__": "scalar", "dtype": "bool", "value": value}
    if isinstance(value, int):
        return {"__kind__": "scalar", "dtype": "int", "value": value}
    if isinstance(value, float):
        return {"__kind__": "scalar", "dtype": "float", "value": _sanitize_float(value)}
    if value is None:
        return {"__kind__": "none"}
    return {"__kind__": "str", "value": str(value)}


# ---------------------------------------------------------------------------
# in-worker comparison (used when outputs exceed the inline transport limit)

def _iter_leaves(enc, path):
    kind = enc.get("__kind__")
    if kind == "list":
        for i, item in enumerate(enc["items"]):
            yield from _iter_leaves(item, "%s[%d]" % (path, i))
    elif kind == "dict":
        for k in sorted(enc["items"]):
            yield from _iter_leaves(enc["items"][k], "%s.%s" % (path, k))
    else:
        yield path, enc


def _as_float(v):
    if v == "nan":
        return math.nan
    if v == "inf":
        return math.inf
    if v == "-inf":
        return -math.inf
    return float(v)


def _compare_encoded(ref, sub, tolerances, nan_equal):
    """Mirror of the host comparator, for spilled payloads."""
    ref_leaves = list(_iter_leaves(ref, ""))
    sub_leaves = list(_iter_leaves(sub, ""))
    if [p for p, _ in ref_leaves] != [p for p, _ in sub_leaves]:
        return {"equal": False, "reason": "structure", "path": "", "dtype": "none"}
    for (path, r), (_, s) in zip(ref_leaves, sub_leaves):
        if r.get("__kind__") != s.get("__kind__"):
            return {"equal": False, "reason": "structure", "path": path, "dtype": "none"}
        if r["__kind__"] == "tensor":
            if r["shape"] != s["shape"] or r["dtype"] != s["dtype"]:
                return {"equal": False, "reason": "shape_or_dtype", "path": path,
                        "dtype": r["dtype"]}
            rtol, atol = tolerances.get(r["dtype"], (0.0, 0.0))
            max_abs = 0.0
            max_rel = 0.0
            first = -1
            for i, (rv, sv) in enumerate(zip(r["data"], s["data"])):
                fr, fs = _as_float(rv), _as_float(sv)
                if math.isnan(fr) or math.isnan(fs):
                    ok = nan_equal and math.isnan(fr) and math.isnan(fs)
                elif math.isinf(fr) or math.isinf(fs):
                    ok = fr == fs
                else:
                    diff = abs(fs - fr)
                    ok = diff <= atol + rtol * abs(fr)
                    if diff > max_abs:
                        max_abs = diff
                    denom = abs(fr)
                    if denom > 0 and diff / denom > max_rel:
                        max_rel = diff / denom
                if not ok and first < 0:
                    first = i
            if first >= 0:
                return {"equal": False, "reason": "values", "path": path,
                        "dtype": r["dtype"], "first_flat_index": first,
                        "max_abs_diff": _sanitize_float(max_abs),
                        "max_rel_diff": _sanitize_float(max_rel)}
        else:
            if r != s:
                return {"equal": False, "reason": "values", "path": path,
                        "dtype": r.get("dtype", "none"), "first_flat_index": 0,
                        "max_abs_diff": 0.0, "max_rel_diff": 0.0}
    return {"equal": True}


# ---------------------------------------------------------------------------
# backends

def _install_tensorlite(defects):
    sys.path.insert(0, HERE)
    import tensorlite

    sys.modules["torch"] = tensorlite
    tensorlite._register_submodules("torch")
    tensorlite._configure_distortions(defects or {})
    return tensorlite


def _compile_subject(torch_mod, model, compile_args, backend_kind):
    args = dict(compile_args or {})
    if backend_kind == "real_compiler":
        if args.pop("fallback_random", False):
            torch_mod._inductor.config.fallback_random = True
        return torch_mod.compile(model, **args)
    return torch_mod.compile(model, **args)


def _clone_value(torch_mod, value):
    t_type = getattr(torch_mod, "Tensor", None)
    if t_type is not None and isinstance(value, t_type):
        return value.clone()
    if isinstance(value, tuple):
        return tuple(_clone_value(torch_mod, v) for v in value)
    if isinstance(value, list):
        return [_clone_value(torch_mod, v) for v in value]
    if isinstance(value, dict):
        return {k: _clone_value(torch_mod, v) for k, v in value.items()}
    return value


class _Phase:
    def __init__(self):
        self.name = "build"


def run_case(req):
    backend = req.get("backend") or {}
    test = req.get("test") or {}
    pipeline = test.get("pipeline") or {"kind": "single_run_differential"}
    kind = backend.get("kind", "defect_simulator")
    tolerances = {k: tuple(v) for k, v in (req.get("tolerances") or {}).items()}
    nan_equal = bool(req.get("nan_equal", False))
    inline_limit = int(req.get("inline_limit_bytes", 1 << 20))

    phase = _Phase()
    timings = {}
    captured_out = io.StringIO()
    captured_err = io.StringIO()

    result = {
        "protocol": PROTOCOL,
        "status": "ok",
        "iterations": [],
        "defects_fired": [],
        "compared_in_worker": False,
        "worker_compare": [],
        "timings": timings,
    }

    try:
        t0 = time.monotonic()
        if kind == "defect_simulator":
            torch_mod = _install_tensorlite(backend.get("defects"))
        elif kind == "real_compiler":
            import torch as torch_mod  # noqa: F401
        else:
            raise ValueError("unknown backend kind: %r" % kind)
        timings["import"] = time.monotonic() - t0

        ns = {"__name__": "ag_case", "torch": torch_mod}
        with contextlib.redirect_stdout(captured_out), contextlib.redirect_stderr(captured_err):
            exec(compile(test.get("model_source", ""), "<model_source>", "exec"), ns)
            exec(compile(test.get("input_spec", ""), "<input_spec>", "exec"), ns)
            model_cls = ns.get("Model")
            gen_input = ns.get("gen_input")
            if model_cls is None or gen_input is None:
                raise ValueError("test case must define Model and gen_input")

            torch_mod.manual_seed(0)
            model_ref = model_cls()
            torch_mod.manual_seed(0)
            model_sub = model_cls()
            torch_mod.manual_seed(1)
            base_args = gen_input()
            if not isinstance(base_args, tuple):
                base_args = (base_args,) if base_args is not None else ()

            ref_args = list(_clone_value(torch_mod, base_args))
            sub_args = list(_clone_value(torch_mod, base_args))

            t1 = time.monotonic()
            phase.name = "subject"
            compiled = _compile_subject(torch_mod, model_sub,
                                        test.get("compile_args"), kind)
            timings["compile"] = time.monotonic() - t1

            pkind = pipeline.get("kind", "single_run_differential")
            iterations = []

            def record(ref_out, sub_out, ra, sa):
                iterations.append((
                    _encode({"output": ref_out, "inputs_after": list(ra)}, torch_mod),
                    _encode({"output": sub_out, "inputs_after": list(sa)}, torch_mod),
                ))

            if pkind == "single_run_differential":
                phase.name = "reference"
                t2 = time.monotonic()
                ref_out = model_ref(*ref_args)
                timings["reference"] = time.monotonic() - t2
                phase.name = "subject"
                t3 = time.monotonic()
                sub_out = compiled(*sub_args)
                timings["subject"] = time.monotonic() - t3
                record(ref_out, sub_out, ref_args, sub_args)
            elif pkind == "repeated_execution":
                repeat = int(pipeline.get("repeat_count", 2))
                hook = None
                hook_src = pipeline.get("state_mutation_hook")
                if hook_src:
                    exec(compile(hook_src, "<state_mutation_hook>", "exec"), ns)
                    hook = ns.get("mutate_state")
                    if hook is None:
                        raise ValueError("state_mutation_hook must define mutate_state")
                for i in range(1, repeat + 1):
                    phase.name = "reference"
                    ref_out = model_ref(*ref_args)
                    phase.name = "subject"
                    sub_out = compiled(*sub_args)
                    record(ref_out, sub_out, ref_args, sub_args)
                    if hook is not None and i < repeat:
                        hook(model_ref, ref_args, i)
                        hook(model_sub, sub_args, i)
            elif pkind == "custom":
                src = pipeline.get("custom_source") or ""
                exec(compile(src, "<custom_pipeline>", "exec"), ns)
                fn = ns.get("pipeline")
                if fn is None:
                    raise ValueError("custom pipeline must define pipeline(ctx)")

                class Ctx:
                    model_factory = staticmethod(model_cls)
                    gen_input_fn = staticmethod(gen_input)
                    compile_model = staticmethod(lambda m: _compile_subject(
                        torch_mod, m, test.get("compile_args"), kind))

                    @staticmethod
                    def record_iteration(reference, subject):
                        iterations.append((_encode(reference, torch_mod),
                                           _encode(subject, torch_mod)))

                phase.name = "subject"
                fn(Ctx)
            else:
                raise ValueError("unknown pipeline kind: %r" % pkind)

        encoded_size = sum(len(json.dumps(r)) + len(json.dumps(s))
                           for r, s in iterations)
        if encoded_size > inline_limit:
            result["compared_in_worker"] = True
            result["worker_compare"] = [
                _compare_encoded(r, s, tolerances, nan_equal) for r, s in iterations
            ]
        else:
            result["iterations"] = [{"reference": r, "subject": s}
                                    for r, s in iterations]
        if kind == "defect_simulator":
            result["defects_fired"] = torch_mod._fired_defects()
    except SyntaxError:
        result["status"] = "invalid_test"
        result["phase"] = "build"
        result["traceback"] = traceback.format_exc(limit=20)
    except Exception:
        result["status"] = "invalid_test" if phase.name == "build" else "crash"
        result["phase"] = phase.name
        result["traceback"] = traceback.format_exc(limit=20)

    result["captured_stdout"] = captured_out.getvalue()[:262144]
    result["captured_stderr"] = captured_err.getvalue()[:262144]
    return result


def probe(req):
    backend = req.get("backend") or {}
    if backend.get("kind") == "real_compiler":
        try:
            import torch  # noqa: F401
            return {"protocol": PROTOCOL, "status": "ok",
                    "framework_version": str(torch.__version__)}
        except Exception:
            return {"protocol": PROTOCOL, "status": "unavailable"}
    return {"protocol": PROTOCOL, "status": "ok", "framework_version": "tensorlite"}


def main():
    raw = sys.stdin.read()
    try:
        req = json.loads(raw)
    except json.JSONDecodeError:
        print(json.dumps({"protocol": PROTOCOL, "status": "invalid_test",
                          "phase": "request", "traceback": "malformed request"}))
        return 0
    action = req.get("action", "run_case")
    if action == "probe":
        doc = probe(req)
    else:
        doc = run_case(req)
    sys.stdout.write(json.dumps(doc, allow_nan=False) + "\n")
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
