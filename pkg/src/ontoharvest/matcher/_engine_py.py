"""Pure-Python match kernel (reference semantics for the Cython twin).

Scans a sentence left to right for leftmost non-overlapping matches of a
compiled element sequence.  Gaps are lazy (shortest completion wins), list
elements consume the longest item run that still lets the rest of the
pattern match, and masked tokens cannot be consumed by anything.
"""

from __future__ import annotations

from ontoharvest.matcher.encode import ANCHOR_ID, NO_ID, OP_GAP, OP_LIST, OP_TOK


def _tok_ok(sent, constraint, i, anchor_id):
    lemma_id, lemma_in, form_in, pos_id, case_id, feat_ids = constraint
    if lemma_id == ANCHOR_ID:
        if sent.lemma[i] != anchor_id:
            return False
    elif lemma_id != NO_ID and sent.lemma[i] != lemma_id:
        return False
    if lemma_in is not None and sent.lemma[i] not in lemma_in:
        return False
    if form_in is not None and sent.form[i] not in form_in:
        return False
    if pos_id != NO_ID and sent.pos[i] != pos_id:
        return False
    if case_id != NO_ID and sent.case[i] != case_id:
        return False
    for f in feat_ids:
        if f not in sent.feats[i]:
            return False
    return True


def _match_rest(sent, ops, pi, ti, anchor_id, mask, binds):
    """Match ops[pi:] starting at token ti; returns end (exclusive) or -1."""
    if pi == len(ops):
        return ti
    op = ops[pi]
    kind = op[0]
    n = sent.n

    if kind == OP_TOK:
        constraint, slot = op[1], op[2]
        if ti < n and not mask[ti] and _tok_ok(sent, constraint, ti, anchor_id):
            if slot != NO_ID:
                binds[slot].append(ti)
            end = _match_rest(sent, ops, pi + 1, ti + 1, anchor_id, mask, binds)
            if end >= 0:
                return end
            if slot != NO_ID:
                binds[slot].pop()
        return -1

    if kind == OP_GAP:
        mn, mx = op[1], op[2]
        for k in range(mn, mx + 1):
            if ti + k > n:
                break
            if k > 0 and mask[ti + k - 1]:
                break  # a skipped token is still consumed; masked blocks it
            end = _match_rest(sent, ops, pi + 1, ti + k, anchor_id, mask, binds)
            if end >= 0:
                return end
        return -1

    # OP_LIST
    item_c, sep_ids, conj_ids, skips, slot = op[1], op[2], op[3], op[4], op[5]

    def connector(k):
        if sent.form[k] in sep_ids or sent.lemma[k] in conj_ids:
            return True
        for skip_c in skips:
            if _tok_ok(sent, skip_c, k, anchor_id):
                return True
        return False

    if ti >= n or mask[ti] or not _tok_ok(sent, item_c, ti, anchor_id):
        return -1
    items = [ti]
    j = ti + 1
    while True:
        k = j
        while k < n and not mask[k] and connector(k):
            k += 1
        if k > j and k < n and not mask[k] and _tok_ok(sent, item_c, k, anchor_id):
            items.append(k)
            j = k + 1
        else:
            break
    for count in range(len(items), 0, -1):
        if slot != NO_ID:
            binds[slot] = list(items[:count])
        end = _match_rest(
            sent, ops, pi + 1, items[count - 1] + 1, anchor_id, mask, binds
        )
        if end >= 0:
            return end
    if slot != NO_ID:
        binds[slot] = []
    return -1


def find_matches(sent, ops, nslots, anchor_id, mask):
    """All leftmost non-overlapping matches.

    Returns ``[(start, end_exclusive, bindings), ...]`` with bindings a
    tuple (one entry per capture slot) of token-position tuples.
    """
    out = []
    i = 0
    n = sent.n
    while i < n:
        binds = [[] for _ in range(nslots)]
        end = _match_rest(sent, ops, 0, i, anchor_id, mask, binds)
        if end > i:
            out.append((i, end, tuple(tuple(b) for b in binds)))
            i = end
        else:
            i += 1
    return out
