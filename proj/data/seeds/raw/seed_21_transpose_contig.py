import torch


class Model(torch.nn.Module):
    def forward(self, x):
        t = x.transpose(0, 1)
        return t.contiguous() + 1


def gen_input():
    return (torch.arange(6, dtype=torch.float32).reshape(2, 3),)


def test_transpose_contig():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
