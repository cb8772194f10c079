"""Compressed digital trie over a fixed alphabet.

Every stored string is terminated by ``$`` so no stored string is a proper
prefix of another.  Node ranges are the singleton string spelled from the
root; an edge ``(v, w)`` covers every prefix of ``w`` that extends ``v``.
Queries are matched with the terminator appended.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .core import LINK, NODE, Kind, LinkStructure, Universe
from .errors import DuplicateString, InvalidItem, ItemNotFound, SymbolOutsideAlphabet

END = "$"


def lcp(a: str, b: str) -> int:
    return len(os.path.commonprefix((a, b)))


@dataclass(frozen=True)
class PrefixChain:
    """Strings ``x`` with ``top <= x <= bottom`` in the prefix order."""

    top: str
    bottom: str

    def intersects(self, other: "PrefixChain") -> bool:
        return lcp(self.bottom, other.bottom) >= max(len(self.top), len(other.top))

    def contains(self, q: str) -> bool:
        q = q + END
        if self.top == self.bottom:
            return q.startswith(self.top)
        return q.startswith(self.bottom[:len(self.top) + 1])


@dataclass(frozen=True)
class TrieMatch:
    element: tuple
    index: int  # characters of q + "$" matched before divergence
    exact: bool


class CompressedTrie(LinkStructure):
    kind = Kind.STRINGS
    range_type = PrefixChain

    def __init__(self, universe: Universe):
        super().__init__(universe)
        self.children: dict = {}  # node string -> {first char: child string}
        self.parent: dict = {}

    def _check(self, s):
        if not isinstance(s, str):
            raise InvalidItem("trie items must be strings, got %r" % (s,))
        alphabet = self.universe.alphabet
        for ch in s:
            if ch not in alphabet:
                raise SymbolOutsideAlphabet("symbol %r not in alphabet" % (ch,))

    @classmethod
    def build(cls, universe: Universe, strings) -> "CompressedTrie":
        trie = cls(universe)
        strings = list(strings)
        for s in strings:
            trie._check(s)
        if len(set(strings)) != len(strings):
            raise DuplicateString("duplicate string")
        trie.items = frozenset(strings)
        trie.ranges[(NODE, "")] = PrefixChain("", "")
        words = sorted(s + END for s in strings)
        if words:
            trie._grow("", words)
        return trie

    def _grow(self, top: str, words: list):
        # words are sorted, share the prefix ``top`` and number at least one
        stack = [(top, words)]
        while stack:
            node, group = stack.pop()
            d = len(node)
            kids = self.children.setdefault(node, {})
            i = 0
            while i < len(group):
                ch = group[i][d]
                j = i
                while j < len(group) and group[j][d] == ch:
                    j += 1
                sub = group[i:j]
                if len(sub) == 1:
                    child = sub[0]
                else:
                    child = sub[0][:lcp(sub[0], sub[-1])]
                    stack.append((child, sub))
                kids[ch] = child
                self.parent[child] = node
                self.ranges[(NODE, child)] = PrefixChain(child, child)
                self.ranges[(LINK, node, child)] = PrefixChain(node, child)
                i = j

    def root(self):
        return (NODE, "")

    def specificity(self, eid):
        if eid[0] == NODE:
            return 2 * len(eid[1])
        return 2 * len(eid[1]) + 1

    def locate_path(self, q: str, start=None) -> list:
        self._check(q)
        return self._walk(q + END, start)[0]

    def search(self, q: str, start=None) -> TrieMatch:
        self._check(q)
        path, index = self._walk(q + END, start)
        return TrieMatch(path[-1], index, index == len(q) + 1)

    def _walk(self, word: str, start):
        path = []
        if start is None:
            node = ""
        elif start[0] == LINK:
            _, v, w = start
            path.append(start)
            if word.startswith(w[:len(v) + 1]):
                if not word.startswith(w):
                    return path, lcp(word, w)
                node = w
            else:
                node = self._climb(v, word, path)
        else:
            node = start[1]
            if not word.startswith(node):
                path.append(start)
                node = self._climb(self.parent[node], word, path)
        while True:
            path.append((NODE, node))
            d = len(node)
            if d == len(word):
                return path, d
            child = self.children.get(node, {}).get(word[d])
            if child is None:
                return path, d
            path.append((LINK, node, child))
            if not word.startswith(child):
                return path, lcp(word, child)
            node = child

    def _climb(self, node, word, path):
        while not word.startswith(node):
            path.append((NODE, node))
            up = self.parent[node]
            path.append((LINK, up, node))
            node = up
        return node

    def conflicts(self, rng: PrefixChain) -> list:
        top, bot = rng.top, rng.bottom
        dt = len(top)
        out = []
        node = ""
        while True:
            kids = self.children.get(node, {})
            d = len(node)
            if d >= dt:
                out.append((NODE, node))
                out.extend((LINK, node, c) for c in kids.values())
            if d >= len(bot):
                break
            child = kids.get(bot[d])
            if child is None:
                break
            if d < dt and lcp(child, bot) >= dt:
                out.append((LINK, node, child))
            if not bot.startswith(child):
                break
            node = child
        return sorted(out)

    def incidences(self) -> set:
        inc = set()
        for e in self.ranges:
            if e[0] == LINK:
                inc.add(((NODE, e[1]), e))
                inc.add(((NODE, e[2]), e))
        return inc

    def depth(self) -> int:
        best = 0
        stack = [("", 1)]
        while stack:
            node, k = stack.pop()
            best = max(best, k)
            for c in self.children.get(node, {}).values():
                stack.append((c, k + 1))
        return best

    # -- local updates ---------------------------------------------------

    def _clone(self) -> "CompressedTrie":
        new = CompressedTrie(self.universe)
        new.items = self.items
        new.ranges = dict(self.ranges)
        new.children = dict(self.children)
        new.parent = dict(self.parent)
        return new

    def _kids(self, node) -> dict:
        kids = dict(self.children.get(node, {}))
        self.children[node] = kids
        return kids

    def _add_node(self, s, added):
        self.ranges[(NODE, s)] = PrefixChain(s, s)
        added.add((NODE, s))

    def _add_link(self, v, w, added):
        self._kids(v)[w[len(v)]] = w
        self.parent[w] = v
        self.ranges[(LINK, v, w)] = PrefixChain(v, w)
        added.add((LINK, v, w))

    def _drop(self, eid, removed):
        del self.ranges[eid]
        removed.add(eid)
        if eid[0] == LINK:
            _, v, w = eid
            kids = self._kids(v)
            if kids.get(w[len(v)]) == w:
                del kids[w[len(v)]]
            if not kids:
                del self.children[v]
            if self.parent.get(w) == v:
                del self.parent[w]
        else:
            self.children.pop(eid[1], None)

    def insert_local(self, s: str):
        """Insert ``s``; returns ``(new, replaced_ids, created_ids)``."""
        self._check(s)
        if s in self.items:
            raise DuplicateString("duplicate string %r" % (s,))
        word = s + END
        path, index = self._walk(word, None)
        ans = path[-1]
        new = self._clone()
        new.items = self.items | {s}
        removed, added = set(), set()
        if ans[0] == NODE:
            at = ans[1]
        else:
            _, v, w = ans
            at = word[:index]
            new._drop(ans, removed)
            new._add_node(at, added)
            new._add_link(v, at, added)
            new._add_link(at, w, added)
        new._add_node(word, added)
        new._add_link(at, word, added)
        return new, sorted(removed - added), sorted(added - removed)

    def delete_local(self, s: str):
        if s not in self.items:
            raise ItemNotFound(s)
        word = s + END
        v = self.parent[word]
        new = self._clone()
        new.items = self.items - {s}
        removed, added = set(), set()
        new._drop((LINK, v, word), removed)
        new._drop((NODE, word), removed)
        kids = new.children.get(v, {})
        if v != "" and len(kids) == 1:
            (only,) = kids.values()
            up = new.parent[v]
            new._drop((LINK, v, only), removed)
            new._drop((LINK, up, v), removed)
            new._drop((NODE, v), removed)
            new._add_link(up, only, added)
        return new, sorted(removed - added), sorted(added - removed)


def trie_build(universe: Universe, strings) -> CompressedTrie:
    return CompressedTrie.build(universe, strings)


def trie_search(trie: CompressedTrie, q: str, start=None) -> TrieMatch:
    return trie.search(q, start)


def trie_insert_local(trie: CompressedTrie, s: str):
    return trie.insert_local(s)
