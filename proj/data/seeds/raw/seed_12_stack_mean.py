import torch


class Model(torch.nn.Module):
    def forward(self, x):
        s = torch.stack([x, x + 1], dim=0)
        return s.mean(dim=0)


def gen_input():
    return (torch.arange(6, dtype=torch.float32),)


def test_stack_mean():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
