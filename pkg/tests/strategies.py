"""Hypothesis strategies over the formula language.

Depth is bounded by construction (nested trees up to three levels, claims
nested inside claims or connectives one level) so the quadratic occurrence
properties stay fast; deeper nesting is exercised by the derivation-backed
generators in randgen.py.
"""

from hypothesis import strategies as st

from gndk.syntax import And, Atom, Bottom, Imp, Immediate, Mediate, Neg, Or, Plain, Tree

atoms = st.sampled_from("p q r s t u".split()).map(Atom)

props = st.recursive(
    atoms | st.just(Bottom()),
    lambda kids: st.one_of(
        st.builds(Neg, kids),
        st.builds(And, kids, kids),
        st.builds(Or, kids, kids),
        st.builds(Imp, kids, kids),
    ),
    max_leaves=6,
)


def _tree(g, c, q):
    return Tree(tuple(g), tuple(c), q)


def _imm(g, c, q):
    return Immediate(tuple(g), tuple(c), q)


def _med(g, c, q):
    return Mediate(tuple(g), tuple(c), q)


plain_entries = props.map(Plain)

trees = st.recursive(
    st.builds(
        _tree,
        st.lists(plain_entries, min_size=1, max_size=2),
        st.lists(plain_entries, min_size=0, max_size=1),
        props,
    ),
    lambda sub: st.builds(
        _tree,
        st.lists(sub | plain_entries, min_size=1, max_size=2),
        st.lists(sub | plain_entries, min_size=0, max_size=1),
        props,
    ),
    max_leaves=3,
)

_shallow_entries = plain_entries | trees

_shallow_imm = st.builds(
    _imm,
    st.lists(_shallow_entries, min_size=1, max_size=2),
    st.lists(_shallow_entries, min_size=0, max_size=1),
    props,
)

entries = plain_entries | trees | _shallow_imm.map(Plain)

immediates = st.builds(
    _imm,
    st.lists(entries, min_size=1, max_size=3),
    st.lists(entries, min_size=0, max_size=2),
    props,
)

mediates = st.builds(
    _med,
    st.lists(props | _shallow_imm, min_size=1, max_size=3),
    st.lists(props, min_size=0, max_size=2),
    props,
)

formulas = st.one_of(
    props,
    immediates,
    mediates,
    st.builds(And, _shallow_imm, props),
    st.builds(Neg, mediates),
)

# claims guaranteed to contain at least one tree entry
tree_claims = st.builds(
    lambda pre, t, post, c, q: Immediate(tuple(pre) + (t,) + tuple(post), tuple(c), q),
    st.lists(entries, min_size=0, max_size=1),
    trees,
    st.lists(entries, min_size=0, max_size=1),
    st.lists(entries, min_size=0, max_size=1),
    props,
)
