"""Addressable binary min-heap with delete-by-item."""
from __future__ import annotations


class IndexedMinHeap:
    """Binary min-heap over hashable items with O(log n) removal by item.

    Keys must be mutually comparable; ties between equal keys are resolved by
    whatever the key encodes, so callers that need a deterministic order fold
    the tie-breaker into the key.
    """

    __slots__ = ("_keys", "_items", "_pos")

    def __init__(self, pairs=()):
        self._keys = []
        self._items = []
        self._pos = {}
        for item, key in pairs:
            if item in self._pos:
                raise KeyError(f"duplicate item {item!r}")
            self._pos[item] = len(self._items)
            self._items.append(item)
            self._keys.append(key)
        for i in reversed(range(len(self._keys) // 2)):
            self._sift_down(i)

    def __len__(self):
        return len(self._keys)

    def __bool__(self):
        return bool(self._keys)

    def __contains__(self, item):
        return item in self._pos

    def items(self):
        """(item, key) pairs in heap-array order."""
        return list(zip(self._items, self._keys))

    def key(self, item):
        return self._keys[self._pos[item]]

    def peek(self):
        """Return ``(item, key)`` of a minimum element, or None if empty."""
        if not self._keys:
            return None
        return self._items[0], self._keys[0]

    def push(self, item, key):
        if item in self._pos:
            raise KeyError(f"item {item!r} already in heap")
        i = len(self._keys)
        self._keys.append(key)
        self._items.append(item)
        self._pos[item] = i
        self._sift_up(i)

    def pop(self):
        if not self._keys:
            raise IndexError("pop from empty heap")
        item, key = self._items[0], self._keys[0]
        self._delete_at(0)
        return item, key

    def remove(self, item):
        """Delete ``item``; returns its key.  Raises KeyError if absent."""
        i = self._pos[item]
        key = self._keys[i]
        self._delete_at(i)
        return key

    def update(self, item, key):
        i = self._pos[item]
        old = self._keys[i]
        self._keys[i] = key
        if key < old:
            self._sift_up(i)
        else:
            self._sift_down(i)

    def _delete_at(self, i):
        keys, items, pos = self._keys, self._items, self._pos
        del pos[items[i]]
        last_key = keys.pop()
        last_item = items.pop()
        if i == len(keys):
            return
        keys[i] = last_key
        items[i] = last_item
        pos[last_item] = i
        if i > 0 and last_key < keys[(i - 1) >> 1]:
            self._sift_up(i)
        else:
            self._sift_down(i)

    def _sift_up(self, i):
        keys, items, pos = self._keys, self._items, self._pos
        key, item = keys[i], items[i]
        while i > 0:
            parent = (i - 1) >> 1
            pkey = keys[parent]
            if not key < pkey:
                break
            keys[i] = pkey
            pitem = items[parent]
            items[i] = pitem
            pos[pitem] = i
            i = parent
        keys[i] = key
        items[i] = item
        pos[item] = i

    def _sift_down(self, i):
        keys, items, pos = self._keys, self._items, self._pos
        n = len(keys)
        key, item = keys[i], items[i]
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            right = child + 1
            if right < n and keys[right] < keys[child]:
                child = right
            ckey = keys[child]
            if not ckey < key:
                break
            keys[i] = ckey
            citem = items[child]
            items[i] = citem
            pos[citem] = i
            i = child
        keys[i] = key
        items[i] = item
        pos[item] = i

    def check(self):
        """Verify the heap property and position map (debug helper)."""
        keys = self._keys
        for i in range(1, len(keys)):
            assert not keys[i] < keys[(i - 1) >> 1], f"heap violated at {i}"
        assert len(self._pos) == len(keys)
        for item, i in self._pos.items():
            assert self._items[i] == item
