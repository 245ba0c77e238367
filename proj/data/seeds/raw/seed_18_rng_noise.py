import torch


class Model(torch.nn.Module):
    def forward(self, x):
        return x * 0.5 + 1


def gen_input():
    torch.manual_seed(3)
    t = torch.randn(4, 4)
    return (t,)


def test_rng_noise():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
