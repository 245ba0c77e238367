import torch


class Model(torch.nn.Module):
    def forward(self, x):
        a = x.narrow(0, 0, 2)
        return torch.cat([a, a], dim=0)


def gen_input():
    return (torch.arange(8, dtype=torch.float32).reshape(4, 2),)


def test_narrow_cat():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
