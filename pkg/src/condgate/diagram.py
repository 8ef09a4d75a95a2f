"""Graphviz rendering of the single-photon history decomposition."""

from __future__ import annotations

from typing import Sequence

from .gates import HistoryTerm
from .netcompile import ModePartition


def format_amplitude(z: complex) -> str:
    z = complex(z)
    re = 0.0 if abs(z.real) < 1e-15 else z.real
    im = 0.0 if abs(z.imag) < 1e-15 else z.imag
    if im == 0.0:
        return f"{re:.6g}"
    if re == 0.0:
        return f"{im:.6g}i"
    return f"{re:.6g}{im:+.6g}i"


def histories_dot(terms: Sequence[HistoryTerm], partition: ModePartition,
                  entries=None) -> str:
    """DOT digraph with one cluster per term and one horizontal rail per mode.

    Rails are dotted ``in -> out`` edges; the photon paths are solid edges.
    The pass-through term carries its amplitude on the ancilla edge. A
    sandwich term ``a_j^dag A a_k`` draws the photon leaving signal ``k`` for
    the detector and the ancilla photon entering signal ``j``; each edge is
    labelled with its network matrix element when ``entries`` is given, and
    the cluster label carries the term amplitude.
    """
    anc = partition.n_signal
    lines = [
        "digraph histories {",
        "  rankdir=LR;",
        '  node [shape=plaintext, fontsize=10];',
    ]
    for t, term in enumerate(terms):
        p = f"t{t}"
        lines.append(f"  subgraph cluster_{p} {{")
        lines.append(f'    label="{term.label} = {format_amplitude(term.amplitude)}";')
        for r in range(partition.modes):
            lines.append(f'    {p}_in{r + 1} [label="{r + 1}"];')
            lines.append(f'    {p}_out{r + 1} [label="{r + 1}"];')
        for r in range(partition.modes):
            lines.append(f"    {p}_in{r + 1} -> {p}_out{r + 1} [style=dotted, arrowhead=none];")
        if term.creation_mode is None:
            lines.append(f'    {p}_in{anc + 1} -> {p}_out{anc + 1} '
                         f'[label="{format_amplitude(term.amplitude)}"];')
        else:
            j, k = term.creation_mode, term.annihilation_mode
            out_lbl = in_lbl = ""
            if entries is not None:
                out_lbl = format_amplitude(entries[anc][k])
                in_lbl = format_amplitude(entries[j][anc])
            lines.append(f'    {p}_in{k + 1} -> {p}_out{anc + 1} [label="{out_lbl}"];')
            lines.append(f'    {p}_in{anc + 1} -> {p}_out{j + 1} [label="{in_lbl}"];')
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
