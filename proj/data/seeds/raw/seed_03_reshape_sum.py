import torch


class Model(torch.nn.Module):
    def forward(self, x):
        y = x.reshape(2, 3)
        return y.sum(dim=0)


def gen_input():
    return (torch.arange(6, dtype=torch.float32),)


def test_reshape_sum():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
