"""Finitely generated subgroups of free groups via folded core graphs.

A subgroup is represented by its folded core graph (basepoint 0): a finite
labeled graph that is deterministic and codeterministic on every generator
label.  Reduced loops at the basepoint correspond exactly to the elements of
the subgroup, which gives constant-rank data: membership, rank, a free basis
from any spanning tree, and rewriting of members as products of the original
generators.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .words import Word, _reduce


def _sym_inverse(t: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-x for x in reversed(t))


def _sym_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return _reduce(a + b)


class SubgroupGraph:
    """Folded core graph of ``<generators>`` inside the rank-``rank`` free group."""

    def __init__(self, rank: int, generators: Sequence[Word]):
        for g in generators:
            if g.rank != rank:
                raise ValueError("generator rank mismatch")
        self.rank = rank
        self.generators = tuple(generators)
        self._build()
        self._expr_cache: Optional[tuple[list[Word], dict[int, tuple[int, ...]]]] = None

    # -- construction -------------------------------------------------

    def _build(self) -> None:
        edges: list[list[int]] = []  # [src, label>0, dst]
        next_vertex = 1
        for gen in self.generators:
            cur = 0
            letters = gen.letters
            for pos, letter in enumerate(letters):
                last = pos == len(letters) - 1
                nxt = 0 if last else next_vertex
                if not last:
                    next_vertex += 1
                if letter > 0:
                    edges.append([cur, letter, nxt])
                else:
                    edges.append([nxt, -letter, cur])
                cur = nxt

        parent = list(range(next_vertex))

        def find(v: int) -> int:
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        def union(a: int, b: int) -> None:
            ra, rb = find(a), find(b)
            if ra != rb:
                # keep the basepoint's class rooted at 0
                if rb == find(0):
                    ra, rb = rb, ra
                parent[rb] = ra

        changed = True
        while changed:
            changed = False
            seen_out: dict[tuple[int, int], int] = {}
            seen_in: dict[tuple[int, int], int] = {}
            dedup: set[tuple[int, int, int]] = set()
            new_edges: list[list[int]] = []
            for src, label, dst in edges:
                src, dst = find(src), find(dst)
                key = (src, label, dst)
                if key in dedup:
                    changed = True
                    continue
                dedup.add(key)
                new_edges.append([src, label, dst])
            edges = new_edges
            for src, label, dst in edges:
                if (src, label) in seen_out and seen_out[(src, label)] != dst:
                    union(dst, seen_out[(src, label)])
                    changed = True
                    break
                seen_out[(src, label)] = dst
                if (dst, label) in seen_in and seen_in[(dst, label)] != src:
                    union(src, seen_in[(dst, label)])
                    changed = True
                    break
                seen_in[(dst, label)] = src

        # relabel vertices compactly, basepoint first, and trim non-core hair
        base = find(0)
        final_edges = sorted({(find(s), l, find(d)) for s, l, d in edges})
        while True:
            degree: dict[int, int] = {}
            for s, l, d in final_edges:
                degree[s] = degree.get(s, 0) + 1
                degree[d] = degree.get(d, 0) + 1
            removable = {
                v for v in degree if v != base and degree[v] <= 1
            }
            if not removable:
                break
            final_edges = [
                e for e in final_edges if e[0] not in removable and e[2] not in removable
            ]

        vertices = {base}
        for s, _, d in final_edges:
            vertices.add(s)
            vertices.add(d)
        order = [base] + sorted(v for v in vertices if v != base)
        relabel = {v: i for i, v in enumerate(order)}
        self.n_vertices = len(order)
        self.edges: list[tuple[int, int, int]] = [
            (relabel[s], l, relabel[d]) for s, l, d in final_edges
        ]
        self._out: dict[tuple[int, int], tuple[int, int]] = {}
        self._in: dict[tuple[int, int], tuple[int, int]] = {}
        for idx, (s, l, d) in enumerate(self.edges):
            self._out[(s, l)] = (d, idx)
            self._in[(d, l)] = (s, idx)

    # -- basic queries -------------------------------------------------

    def subgroup_rank(self) -> int:
        return len(self.edges) - self.n_vertices + 1

    def _step(self, vertex: int, letter: int) -> Optional[tuple[int, int, int]]:
        """Follow ``letter`` from ``vertex``: (next vertex, edge id, direction)."""
        if letter > 0:
            hit = self._out.get((vertex, letter))
            if hit is None:
                return None
            return hit[0], hit[1], 1
        hit = self._in.get((vertex, -letter))
        if hit is None:
            return None
        return hit[0], hit[1], -1

    def contains(self, u: Word) -> bool:
        if u.rank != self.rank:
            raise ValueError("rank mismatch")
        cur = 0
        for letter in u.letters:
            step = self._step(cur, letter)
            if step is None:
                return False
            cur = step[0]
        return cur == 0

    def is_whole_group(self) -> bool:
        """True when the graph is the rank-``n`` rose, i.e. the subgroup is everything."""
        return self.n_vertices == 1 and len(self.edges) == self.rank

    # -- spanning tree and basis ----------------------------------------

    def _tree(self) -> tuple[list[Word], set[int], list[int]]:
        """BFS spanning tree: (path word to each vertex, tree edge ids, basis edge ids)."""
        path: list[Optional[Word]] = [None] * self.n_vertices
        path[0] = Word.identity(self.rank)
        tree_edges: set[int] = set()
        queue = [0]
        while queue:
            v = queue.pop(0)
            for letter in list(range(1, self.rank + 1)) + [-l for l in range(1, self.rank + 1)]:
                step = self._step(v, letter)
                if step is None:
                    continue
                w, edge_id, _ = step
                if path[w] is None:
                    path[w] = path[v] * Word(self.rank, (letter,))
                    tree_edges.add(edge_id)
                    queue.append(w)
        basis_edges = [i for i in range(len(self.edges)) if i not in tree_edges]
        assert all(p is not None for p in path)
        return [p for p in path if p is not None], tree_edges, basis_edges

    def basis(self) -> list[Word]:
        """A free basis of the subgroup, one word per non-tree edge."""
        path, _, basis_edges = self._tree()
        out = []
        for edge_id in basis_edges:
            s, l, d = self.edges[edge_id]
            out.append(path[s] * Word(self.rank, (l,)) * path[d].inverse())
        return out

    def _trace_symbols(self, u: Word) -> Optional[tuple[int, ...]]:
        """Rewrite a member ``u`` over the tree basis (1-based signed symbols)."""
        _, _, basis_edges = self._tree()
        index_of = {edge_id: i + 1 for i, edge_id in enumerate(basis_edges)}
        cur = 0
        symbols: list[int] = []
        for letter in u.letters:
            step = self._step(cur, letter)
            if step is None:
                return None
            nxt, edge_id, direction = step
            if edge_id in index_of:
                symbols.append(direction * index_of[edge_id])
            cur = nxt
        if cur != 0:
            return None
        return _reduce(symbols)

    # -- expressions over the original generators -----------------------

    def _expression_tables(self) -> tuple[list[Word], dict[int, tuple[int, ...]]]:
        """Basis words plus, for each basis symbol, a rewriting over the generators.

        The generators, rewritten over the tree basis, generate the whole free
        group on the basis symbols; Nielsen reduction with history then turns
        them into the standard symbols, and the recorded histories express each
        symbol as a product of the original generators.
        """
        if self._expr_cache is not None:
            return self._expr_cache
        basis_words = self.basis()
        r = len(basis_words)
        gen_vecs = []
        for g in self.generators:
            vec = self._trace_symbols(g)
            assert vec is not None, "generator must trace in its own graph"
            gen_vecs.append(vec)
        symbol_exprs = _standard_symbol_expressions(gen_vecs, r)
        self._expr_cache = (basis_words, symbol_exprs)
        return self._expr_cache

    def expression(self, u: Word) -> Optional[tuple[int, ...]]:
        """Write ``u`` as a reduced product of the generators.

        Returns signed 1-based indices into ``self.generators`` whose product
        is exactly ``u``, or None when ``u`` is not in the subgroup.  The
        result is re-multiplied and checked before being returned.
        """
        symbols = self._trace_symbols(u)
        if symbols is None:
            return None
        _, symbol_exprs = self._expression_tables()
        out: tuple[int, ...] = ()
        for sym in symbols:
            expr = symbol_exprs[abs(sym)]
            out = _sym_mul(out, expr if sym > 0 else _sym_inverse(expr))
        product = Word.identity(self.rank)
        for idx in out:
            g = self.generators[abs(idx) - 1]
            product = product * (g if idx > 0 else g.inverse())
        assert product == u, "expression failed to re-multiply"
        return out


def _standard_symbol_expressions(
    gen_vecs: list[tuple[int, ...]], r: int
) -> dict[int, tuple[int, ...]]:
    """Express each standard symbol 1..r over the given generating vectors.

    ``gen_vecs`` are words over symbols 1..r that generate the whole free
    group of rank ``r``.  Nielsen reduction with history (greedy shrinking,
    completed by a breadth-first search over non-length-increasing moves when
    the greedy fixpoint is not yet a permuted standard basis) produces for
    every symbol a history word over generator indices.
    """
    items: list[tuple[tuple[int, ...], tuple[int, ...]]] = [
        (vec, (j + 1,)) for j, vec in enumerate(gen_vecs)
    ]

    def nontrivial(state):
        return [it for it in state if it[0]]

    def standard_table(state) -> Optional[dict[int, tuple[int, ...]]]:
        live = nontrivial(state)
        if any(len(vec) != 1 for vec, _ in live):
            return None
        seen: dict[int, tuple[int, ...]] = {}
        for vec, hist in live:
            sym = vec[0]
            idx = abs(sym)
            if idx in seen:
                return None
            seen[idx] = hist if sym > 0 else _sym_inverse(hist)
        if set(seen) != set(range(1, r + 1)):
            return None
        return seen

    def greedy(state):
        state = list(state)
        changed = True
        while changed:
            changed = False
            for i in range(len(state)):
                vi, hi = state[i]
                if not vi:
                    continue
                for j in range(len(state)):
                    if i == j or not state[j][0]:
                        continue
                    vj, hj = state[j]
                    for vec_j, hist_j in ((vj, hj), (_sym_inverse(vj), _sym_inverse(hj))):
                        right = _sym_mul(vi, vec_j)
                        if len(right) < len(vi):
                            state[i] = (right, _sym_mul(hi, hist_j))
                            vi, hi = state[i]
                            changed = True
                            continue
                        left = _sym_mul(vec_j, vi)
                        if len(left) < len(vi):
                            state[i] = (left, _sym_mul(hist_j, hi))
                            vi, hi = state[i]
                            changed = True
        return state

    items = greedy(items)
    table = standard_table(items)
    if table is not None:
        return table

    # Non-increasing BFS completes the rare fixpoints greedy leaves behind.
    def key(state):
        return tuple(sorted(vec for vec, _ in state if vec))

    from collections import deque

    queue = deque([tuple(items)])
    seen_states = {key(items)}
    while queue:
        state = list(queue.popleft())
        table = standard_table(state)
        if table is not None:
            return table
        for i in range(len(state)):
            vi, hi = state[i]
            if not vi:
                continue
            moves = []
            for j in range(len(state)):
                if i == j or not state[j][0]:
                    continue
                vj, hj = state[j]
                for vec_j, hist_j in ((vj, hj), (_sym_inverse(vj), _sym_inverse(hj))):
                    moves.append((_sym_mul(vi, vec_j), _sym_mul(hi, hist_j)))
                    moves.append((_sym_mul(vec_j, vi), _sym_mul(hist_j, hi)))
            moves.append((_sym_inverse(vi), _sym_inverse(hi)))
            for vec_new, hist_new in moves:
                if len(vec_new) > len(vi):
                    continue
                nxt = list(state)
                nxt[i] = (vec_new, hist_new)
                nxt = greedy(nxt)
                k = key(nxt)
                if k in seen_states:
                    continue
                seen_states.add(k)
                table = standard_table(nxt)
                if table is not None:
                    return table
                queue.append(tuple(nxt))
    raise RuntimeError("Nielsen standardization did not terminate in a standard basis")


def member(rank: int, generators: Sequence[Word], u: Word) -> Optional[tuple[int, ...]]:
    """Expression of ``u`` over ``generators`` (signed 1-based indices), or None."""
    return SubgroupGraph(rank, generators).expression(u)
