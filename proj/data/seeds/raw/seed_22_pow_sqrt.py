import torch


class Model(torch.nn.Module):
    def forward(self, x):
        return torch.sqrt(x * x + 1.0)


def gen_input():
    return (torch.arange(6, dtype=torch.float32) - 2.0,)


def test_pow_sqrt():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
