import torch


class Model(torch.nn.Module):
    def forward(self, x):
        parts = torch.split(x, 2, dim=0)
        return parts[0] + parts[1]


def gen_input():
    return (torch.arange(8, dtype=torch.float32).reshape(4, 2),)


def test_split_sum():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
