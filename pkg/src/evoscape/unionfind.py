import numpy as np


class DisjointSet:
    """Union-find over the integers 0..n-1 (union by size, path halving)."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def __len__(self):
        return len(self.parent)

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def labels(self) -> np.ndarray:
        """Component label per element, numbered by smallest member."""
        out = np.empty(len(self.parent), dtype=np.int64)
        ids: dict[int, int] = {}
        for x in range(len(self.parent)):
            root = self.find(x)
            out[x] = ids.setdefault(root, len(ids))
        return out
