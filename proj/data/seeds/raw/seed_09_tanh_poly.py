import torch


class Model(torch.nn.Module):
    def forward(self, x):
        return torch.tanh(x) + x * 0.5


def gen_input():
    return (torch.arange(6, dtype=torch.float32),)


def test_tanh_poly():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
