import torch


class Model(torch.nn.Module):
    def forward(self, x):
        y = x.unsqueeze(dim=0)
        return y.squeeze(dim=0) + 1


def gen_input():
    return (torch.arange(6, dtype=torch.float32),)


def test_unsqueeze_squeeze():
    model = Model()
    args = gen_input()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
