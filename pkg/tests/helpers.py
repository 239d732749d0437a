import numpy as np

from lambek_dm import Lexicon
from lambek_dm.logic import Atom, Over, Under
from lambek_dm.terms import AppOver, AppUnder, LamL, LamR, Var, has_redex, size, substitute, type_of

SPAIN_TYPES = {"tall": "n/n", "person": "n", "from": "(n\\n)/np", "Spain": "np"}


def spain_lexicon(seed=0, dim=2, four_words=True) -> Lexicon:
    """The 'tall person from Spain' lexicon with seeded random values."""
    rng = np.random.default_rng(seed)
    lex = Lexicon({"n": dim, "np": dim}, spaces={"n": "N", "np": "N"})
    lex.add("tall", "n/n", rng.normal(size=dim**4))
    lex.add("person", "n", rng.normal(size=dim**2))
    if four_words:
        lex.add("from", "(n\\n)/np", rng.normal(size=dim**6))
        lex.add("Spain", "np", rng.normal(size=dim**2))
    else:
        lex.add("from_Spain", "n\\n", rng.normal(size=dim**4))
    return lex


def random_spd(rng, n):
    a = rng.normal(size=(n, n))
    return a @ a.T + n * np.eye(n)


def random_invertible(rng, n, max_cond=100.0):
    # invariance checks in the new basis lose about eps * cond(lam)**2
    while True:
        lam = rng.normal(size=(n, n))
        if np.linalg.cond(lam) <= max_cond:
            return lam


# -- random well-typed linear terms ---------------------------------------


TERM_ATOMS = ("a", "b")
TERM_DIMS = {"a": 2, "b": 3}


def _small_type(rng):
    a = Atom(TERM_ATOMS[rng.integers(2)])
    if rng.random() < 0.2:
        b = Atom(TERM_ATOMS[rng.integers(2)])
        return Over(a, b) if rng.random() < 0.5 else Under(a, b)
    return a


class _Names:
    def __init__(self):
        self.n = 0

    def __call__(self, prefix):
        self.n += 1
        return f"{prefix}{self.n}"


def _gen(rng, ty, budget, names):
    options = ["var"]
    if budget >= 3:
        options += ["over", "under"]
    if budget >= 2 and isinstance(ty, (Over, Under)):
        options += ["lam", "lam"]
    choice = options[rng.integers(len(options))]
    if choice == "over":
        a = _small_type(rng)
        fun, fenv = _gen(rng, Over(ty, a), budget - 2, names)
        arg, aenv = _gen(rng, a, budget - 1 - size(fun), names)
        return AppOver(fun, arg), fenv + aenv
    if choice == "under":
        a = _small_type(rng)
        arg, aenv = _gen(rng, a, budget - 2, names)
        fun, fenv = _gen(rng, Under(a, ty), budget - 1 - size(arg), names)
        return AppUnder(arg, fun), aenv + fenv
    if choice == "lam":
        right = isinstance(ty, Over)
        body_t, hyp_t = ty.result, ty.arg
        for _ in range(10):
            body, env = _gen(rng, body_t, budget - 1, names)
            if not env:
                continue
            edge = env[-1] if right else env[0]
            if edge[1] == hyp_t:
                x = names("h")
                body = substitute(body, edge[0], Var(x))
                rest = env[:-1] if right else env[1:]
                return (LamR(x, hyp_t, body) if right else LamL(x, hyp_t, body)), rest
    name = names("v")
    return Var(name), [(name, ty)]


def random_linear_term(rng, max_nodes=6, need_redex=True):
    """A random well-typed linear term of at most ``max_nodes`` nodes and its environment."""
    while True:
        goal = _small_type(rng)
        term, env = _gen(rng, goal, max_nodes, _Names())
        if need_redex and not has_redex(term):
            continue
        if not env:
            continue
        assert type_of(term, env) == goal
        return term, env
