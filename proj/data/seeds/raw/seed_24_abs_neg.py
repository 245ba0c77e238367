import torch


class Model(torch.nn.Module):
    def forward(self, x):
        return (-x).abs() + x


def gen_input():
    return (torch.arange(6, dtype=torch.float32) - 3.0,)


def test_abs_neg():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
