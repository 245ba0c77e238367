import torch


class CounterModel(torch.nn.Module):
    def __init__(self):
        super().__init__()
        self.value = -1
        self.cache = torch.tensor([2, 3, 4, 5, 6, 7])

    def forward(self):
        self.value += 1
        return self.cache[self.value]


def build_inputs():
    return ()


def test_counter_cache():
    reference = CounterModel()
    compiled = torch.compile(CounterModel())
    for _ in range(6):
        expected = reference()
        actual = compiled()
        torch.testing.assert_close(actual, expected)
