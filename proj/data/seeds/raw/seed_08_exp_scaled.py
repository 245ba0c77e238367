import torch


class Model(torch.nn.Module):
    def forward(self, x):
        return torch.exp(x * 0.25)


def gen_input():
    return (torch.arange(6, dtype=torch.float32),)


def test_exp_scaled():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
