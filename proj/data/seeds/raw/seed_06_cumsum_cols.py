import torch


class Model(torch.nn.Module):
    def forward(self, x):
        return torch.cumsum(x, dim=0)


def gen_input():
    return (torch.arange(8, dtype=torch.float32).reshape(4, 2),)


def test_cumsum_cols():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
