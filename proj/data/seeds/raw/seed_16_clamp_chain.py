import torch


class Model(torch.nn.Module):
    def forward(self, x):
        return torch.clamp(x, min=0.0, max=4.0) * 0.5


def gen_input():
    return (torch.arange(8, dtype=torch.float32) - 3.0,)


def test_clamp_chain():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
