# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled match kernel; semantics identical to _engine_py (kept in lock
step, see the parity test suite).  Token arrays are viewed as C int
buffers; set membership for lemma_in/form_in/feats stays on Python
objects."""

from ontoharvest.matcher.encode import ANCHOR_ID as _ANCHOR_ID
from ontoharvest.matcher.encode import NO_ID as _NO_ID
from ontoharvest.matcher.encode import OP_GAP as _OP_GAP
from ontoharvest.matcher.encode import OP_LIST as _OP_LIST
from ontoharvest.matcher.encode import OP_TOK as _OP_TOK

cdef int ANCHOR_ID = _ANCHOR_ID
cdef int NO_ID = _NO_ID
cdef int OP_TOK = _OP_TOK
cdef int OP_GAP = _OP_GAP
cdef int OP_LIST = _OP_LIST


cdef bint _tok_ok(int[:] lemma, int[:] form, int[:] pos, int[:] case,
                  tuple feats, tuple constraint, int i, int anchor_id):
    cdef int lemma_id = constraint[0]
    cdef int pos_id = constraint[3]
    cdef int case_id = constraint[4]
    if lemma_id == ANCHOR_ID:
        if lemma[i] != anchor_id:
            return False
    elif lemma_id != NO_ID and lemma[i] != lemma_id:
        return False
    lemma_in = constraint[1]
    if lemma_in is not None and lemma[i] not in lemma_in:
        return False
    form_in = constraint[2]
    if form_in is not None and form[i] not in form_in:
        return False
    if pos_id != NO_ID and pos[i] != pos_id:
        return False
    if case_id != NO_ID and case[i] != case_id:
        return False
    tok_feats = feats[i]
    for f in constraint[5]:
        if f not in tok_feats:
            return False
    return True


cdef int _match_rest(int[:] lemma, int[:] form, int[:] pos, int[:] case,
                     tuple feats, int n, tuple ops, int pi, int ti,
                     int anchor_id, unsigned char[:] mask, list binds):
    cdef int kind, slot, mn, mx, k, j, end, count
    if pi == len(ops):
        return ti
    op = ops[pi]
    kind = op[0]

    if kind == OP_TOK:
        constraint = op[1]
        slot = op[2]
        if ti < n and not mask[ti] and _tok_ok(lemma, form, pos, case, feats,
                                               constraint, ti, anchor_id):
            if slot != NO_ID:
                binds[slot].append(ti)
            end = _match_rest(lemma, form, pos, case, feats, n, ops,
                              pi + 1, ti + 1, anchor_id, mask, binds)
            if end >= 0:
                return end
            if slot != NO_ID:
                binds[slot].pop()
        return -1

    if kind == OP_GAP:
        mn = op[1]
        mx = op[2]
        for k in range(mn, mx + 1):
            if ti + k > n:
                break
            if k > 0 and mask[ti + k - 1]:
                break
            end = _match_rest(lemma, form, pos, case, feats, n, ops,
                              pi + 1, ti + k, anchor_id, mask, binds)
            if end >= 0:
                return end
        return -1

    # OP_LIST
    item_c = op[1]
    sep_ids = op[2]
    conj_ids = op[3]
    skips = op[4]
    slot = op[5]

    if ti >= n or mask[ti] or not _tok_ok(lemma, form, pos, case, feats,
                                          item_c, ti, anchor_id):
        return -1
    cdef list items = [ti]
    j = ti + 1
    while True:
        k = j
        while k < n and not mask[k] and _connector(lemma, form, pos, case, feats,
                                                   sep_ids, conj_ids, skips,
                                                   k, anchor_id):
            k += 1
        if k > j and k < n and not mask[k] and _tok_ok(lemma, form, pos, case,
                                                       feats, item_c, k, anchor_id):
            items.append(k)
            j = k + 1
        else:
            break
    for count in range(len(items), 0, -1):
        if slot != NO_ID:
            binds[slot] = list(items[:count])
        end = _match_rest(lemma, form, pos, case, feats, n, ops, pi + 1,
                          <int> items[count - 1] + 1, anchor_id, mask, binds)
        if end >= 0:
            return end
    if slot != NO_ID:
        binds[slot] = []
    return -1


cdef bint _connector(int[:] lemma, int[:] form, int[:] pos, int[:] case,
                     tuple feats, object sep_ids, object conj_ids, tuple skips,
                     int k, int anchor_id):
    if form[k] in sep_ids or lemma[k] in conj_ids:
        return True
    for skip_c in skips:
        if _tok_ok(lemma, form, pos, case, feats, skip_c, k, anchor_id):
            return True
    return False


def find_matches(sent, tuple ops, int nslots, int anchor_id, mask):
    """Driver mirroring _engine_py.find_matches."""
    if sent.n == 0:
        return []
    cdef int[:] lemma = sent.lemma
    cdef int[:] form = sent.form
    cdef int[:] pos = sent.pos
    cdef int[:] case = sent.case
    cdef tuple feats = sent.feats
    cdef int n = sent.n
    cdef unsigned char[:] mask_view = mask
    cdef int i = 0
    cdef int end
    cdef list out = []
    cdef list binds
    while i < n:
        binds = [[] for _ in range(nslots)]
        end = _match_rest(lemma, form, pos, case, feats, n, ops, 0, i,
                          anchor_id, mask_view, binds)
        if end > i:
            out.append((i, end, tuple(tuple(b) for b in binds)))
            i = end
        else:
            i += 1
    return out
