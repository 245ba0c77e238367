import torch


class Model(torch.nn.Module):
    def __init__(self):
        super().__init__()
        self.weight = torch.nn.Parameter(
            torch.arange(6, dtype=torch.float32).reshape(2, 3) * 0.5)

    def forward(self, x):
        return torch.matmul(x, self.weight.t())


def gen_input():
    return (torch.arange(12, dtype=torch.float32).reshape(4, 3),)


def test_param_matmul():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
