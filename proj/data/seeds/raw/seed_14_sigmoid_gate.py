import torch


class Model(torch.nn.Module):
    def forward(self, x):
        return torch.sigmoid(x) * x


def gen_input():
    return (torch.arange(6, dtype=torch.float32) - 2.5,)


def test_sigmoid_gate():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
