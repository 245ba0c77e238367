import torch


class Model(torch.nn.Module):
    def forward(self, x):
        f = x.flatten()
        return torch.matmul(f, f)


def gen_input():
    return (torch.arange(6, dtype=torch.float32).reshape(2, 3),)


def test_flatten_dot():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
