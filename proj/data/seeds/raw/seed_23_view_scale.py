import torch


class Model(torch.nn.Module):
    def forward(self, x):
        v = x.view(3, 2)
        return v * 3


def gen_input():
    return (torch.arange(6, dtype=torch.float32),)


def test_view_scale():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
