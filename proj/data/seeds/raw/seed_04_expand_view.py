import torch


class Model(torch.nn.Module):
    def forward(self, x):
        y = x.expand(2, *x.shape)
        return y


def gen_input():
    return (torch.tensor([0, 1, 2, 3, 4, 5]),)


def test_expand_view():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
