import torch


class SimpleMatmul(torch.nn.Module):
    def forward(self, x, w):
        return torch.matmul(x, w) + 1

def build_inputs():
    x = torch.arange(6, dtype=torch.float32).reshape(2, 3)
    w = torch.arange(12, dtype=torch.float32).reshape(3, 4)
    return (x, w)


def test_simple_matmul():
    model = SimpleMatmul()
    args = build_inputs()
    expected = model(*args)
    compiled = torch.compile(model)
    torch.testing.assert_close(compiled(*args), expected)
