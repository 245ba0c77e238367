import torch


class Model(torch.nn.Module):
    def forward(self, x):
        return x.mean(dim=1) * 4.0


def gen_input():
    return (torch.arange(8, dtype=torch.float32).reshape(2, 4),)


def test_mean_rows():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
