"""Discrete-log arithmetic for field towers F_p <= F_q <= F_{q^k} <= F_{q^n}.

The top field F_{p^(e*n)} is realized as F_p[x]/(f) for a deterministically
chosen primitive irreducible f, and nonzero elements are stored as power
indices of the root omega: the int ``i`` means ``omega**i`` and ``ZERO``
means 0.  Multiplication is index arithmetic mod p**(e*n)-1, addition goes
through a Zech logarithm table (``zech[i] = log(1 + omega**i)``), and the
subfield ladder is reached through index multiples: ``omega**N`` generates
the multiplicative group of the middle field of size q**k, where
``N = (q**n - 1) / (q**k - 1)``, and similarly for F_q.

Everything is immutable after construction, so towers and their tables can
be shared freely between threads.
"""

from __future__ import annotations

from array import array
from functools import lru_cache
from math import gcd

from .errors import BudgetExceededError

ZERO = -1
DEFAULT_TABLE_CAP = 1 << 22


# ---------------------------------------------------------------------------
# small number theory helpers


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n, ascending (trial division)."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Split q = p**e with p prime, or raise ValueError."""
    if q < 2:
        raise ValueError(f"q must be at least 2, got {q}")
    ps = prime_factors(q)
    if len(ps) != 1:
        raise ValueError(f"q = {q} is not a prime power")
    p = ps[0]
    e = 0
    while q > 1:
        q //= p
        e += 1
    return p, e


# ---------------------------------------------------------------------------
# dense polynomials over F_p, coefficient lists low-to-high


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    """a*b mod f, with f monic."""
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    d = len(f) - 1
    for i in range(len(prod) - 1, d - 1, -1):
        c = prod[i]
        if c:
            prod[i] = 0
            for j in range(d):
                prod[i - d + j] = (prod[i - d + j] - c * f[j]) % p
    return _ptrim(prod)


def _ppowmod(a: list[int], t: int, f: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmulmod(a, [1], f, p)
    while t:
        if t & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        t >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        inv = pow(b[-1], p - 2, p)
        d = len(b) - 1
        r = list(a)
        while len(r) - 1 >= d and r:
            c = (r[-1] * inv) % p
            shift = len(r) - 1 - d
            for j in range(len(b)):
                r[shift + j] = (r[shift + j] - c * b[j]) % p
            _ptrim(r)
        a, b = b, r
    return a


def is_irreducible(f: list[int], p: int) -> bool:
    """Distinct-degree style criterion: x^(p^d) = x mod f and, for every
    prime divisor l of d, gcd(x^(p^(d/l)) - x, f) is constant."""
    d = len(f) - 1
    if d < 1 or f[-1] != 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    if _ppowmod(x, p**d, f, p) != x:
        return False
    for ell in prime_factors(d):
        g = _ppowmod(x, p ** (d // ell), f, p)
        g = _ptrim([(c - xc) % p for c, xc in
                    zip(g + [0] * 2, x + [0] * max(0, len(g) - 2))])
        if len(_pgcd(g, f, p)) > 1:
            return False
    return True


def x_has_full_order(f: list[int], p: int) -> bool:
    """True iff x mod f has multiplicative order exactly p**deg(f) - 1."""
    d = len(f) - 1
    m = p**d - 1
    if _ppowmod([0, 1], m, f, p) != [1]:
        return False
    for ell in prime_factors(m):
        if _ppowmod([0, 1], m // ell, f, p) == [1]:
            return False
    return True


@lru_cache(maxsize=None)
def find_modulus(p: int, d: int) -> tuple[int, ...]:
    """Smallest primitive irreducible monic polynomial of degree d over F_p.

    Candidates are ordered by the integer value of the non-leading
    coefficient vector read as base-p digits (constant term least
    significant), which makes the choice reproducible across runs without
    shipping a table.
    """
    for val in range(1, p**d):
        if val % p == 0:
            continue  # x divides f, so x cannot generate the units
        coeffs, v = [], val
        for _ in range(d):
            coeffs.append(v % p)
            v //= p
        coeffs.append(1)
        if is_irreducible(coeffs, p) and x_has_full_order(coeffs, p):
            return tuple(coeffs)
    raise RuntimeError(f"no primitive polynomial of degree {d} over F_{p}")


# ---------------------------------------------------------------------------
# scalar fields: canonical F_q indices used by all matrix code
#
# Prime q: the index is the residue mod p.  Prime powers: index 0 is zero and
# index j >= 1 denotes g**j for a generator g of F_q^* (so the identity sits
# at index q-1).


class ScalarField:
    """Table-driven arithmetic on F_q scalar indices in [0, q)."""

    __slots__ = ("q", "p", "e", "one", "add_t", "mul_t", "neg_t", "inv_t")

    def __init__(self, q, p, e, one, add_t, mul_t, neg_t, inv_t):
        self.q = q
        self.p = p
        self.e = e
        self.one = one
        self.add_t = add_t
        self.mul_t = mul_t
        self.neg_t = neg_t
        self.inv_t = inv_t

    def add(self, a: int, b: int) -> int:
        return self.add_t[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_t[a][self.neg_t[b]]

    def mul(self, a: int, b: int) -> int:
        return self.mul_t[a][b]

    def neg(self, a: int) -> int:
        return self.neg_t[a]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero scalar")
        return self.inv_t[a]

    def __repr__(self):
        return f"ScalarField(q={self.q})"

    @staticmethod
    def for_prime(p: int) -> "ScalarField":
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        add_t = tuple(tuple((a + b) % p for b in range(p)) for a in range(p))
        mul_t = tuple(tuple((a * b) % p for b in range(p)) for a in range(p))
        neg_t = tuple((-a) % p for a in range(p))
        inv_t = tuple(0 if a == 0 else pow(a, p - 2, p) for a in range(p))
        return ScalarField(p, p, 1, 1, add_t, mul_t, neg_t, inv_t)

    @staticmethod
    def for_prime_power(q: int) -> "ScalarField":
        """Standalone F_q with the canonical smallest-modulus construction.

        For e > 1 the index labels refer to this field's own generator; they
        are only interchangeable with a tower's scalars when q is prime.
        """
        p, e = prime_power(q)
        if e == 1:
            return ScalarField.for_prime(p)
        if q > 4096:
            raise BudgetExceededError(f"scalar tables for q={q} exceed cap")
        tower = build_tower(p, 1, 1, e)  # top field F_{p^e} = F_q
        m = q - 1
        # index j >= 1 maps to omega**j in the small field
        def idx_log(j):  # index -> log
            return j % m
        def log_idx(l):  # log -> index
            return m if l == 0 else l
        add_t, mul_t = [], []
        for a in range(q):
            arow, mrow = [], []
            for b in range(q):
                if a == 0 or b == 0:
                    mrow.append(0)
                else:
                    mrow.append(log_idx((idx_log(a) + idx_log(b)) % m))
                ea = ZERO if a == 0 else idx_log(a)
                eb = ZERO if b == 0 else idx_log(b)
                s = tower.add(ea, eb)
                arow.append(0 if s == ZERO else log_idx(s))
            add_t.append(tuple(arow))
            mul_t.append(tuple(mrow))
        neg_t = [0] * q
        inv_t = [0] * q
        for a in range(1, q):
            na = tower.neg(idx_log(a))
            neg_t[a] = log_idx(na)
            inv_t[a] = log_idx((-idx_log(a)) % m)
        return ScalarField(q, p, e, q - 1, tuple(add_t), tuple(mul_t),
                           tuple(neg_t), tuple(inv_t))


# ---------------------------------------------------------------------------
# the tower


class FieldTower:
    """Tables realizing F_p <= F_q <= F_{q^k} <= F_{q^n} with q = p**e.

    Use :func:`build_tower` to construct one.  Elements of the top field are
    ints: ZERO, or a power index in [0, p**(e*n) - 2].
    """

    def __init__(self, p: int, e: int, k: int, n: int, modulus: tuple[int, ...],
                 table_cap: int = DEFAULT_TABLE_CAP):
        self.p = p
        self.e = e
        self.k = k
        self.n = n
        self.q = p**e
        self.qk = self.q**k
        self.qn = self.q**n
        self.degree = e * n
        self.size = p**self.degree
        self.m = self.size - 1
        if self.size > table_cap:
            raise BudgetExceededError(
                f"field size p^(e*n) = {self.size} exceeds table cap {table_cap}")
        self.modulus = tuple(modulus)
        self.N = self.m // (self.qk - 1) if self.qk > 1 else 1
        if self.qk > 1 and self.m % (self.qk - 1) != 0:
            raise ValueError("internal: q^k - 1 must divide q^n - 1")
        self._build_tables()
        self._build_scalars()
        self._build_coords()

    # -- construction ------------------------------------------------------

    def _build_tables(self):
        p, d, m = self.p, self.degree, self.m
        f = list(self.modulus)
        exp = array("q", [0] * m)
        cur = [1] + [0] * (d - 1)
        for i in range(m):
            code = 0
            for c in reversed(cur):
                code = code * p + c
            exp[i] = code
            # multiply by x and reduce by the monic modulus
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for j in range(d):
                    cur[j] = (cur[j] - top * f[j]) % p
        # primitivity of the modulus guarantees the cycle closes only now
        if m > 0 and exp[0] != 1:
            raise ValueError("internal: table build did not start at 1")
        log = array("q", [ZERO] * self.size)
        for i in range(m):
            if log[exp[i]] != ZERO and exp[i] != exp[0]:
                raise ValueError("modulus is not primitive: exp table collides")
            log[exp[i]] = i
        if m > 1 and log[1] != 0:
            raise ValueError("modulus is not primitive: order of x too small")
        # zech[i] = log(1 + omega**i); -1 marks 1 + omega**i = 0
        zech = array("q", [ZERO] * m)
        for i in range(m):
            code = exp[i]
            c0 = code % p
            s = code - c0 + ((c0 + 1) % p)
            zech[i] = log[s] if s else ZERO
        self.exp = exp
        self.log = log
        self.zech = zech

    def _build_scalars(self):
        q, m = self.q, self.m
        # log index of the canonical F_q generator inside the big field
        self.q_gen_log = (m // (q - 1)) % m if m else 0
        if self.e == 1:
            elem = [ZERO] * q
            if q > 1:
                elem[1] = 0
            for r in range(2, q):
                elem[r] = self.add(elem[r - 1], 0)
            self.scalar_field = ScalarField.for_prime(self.p)
        else:
            elem = [ZERO] * q
            for j in range(1, q):
                elem[j] = (j * self.q_gen_log) % m
            self.scalar_field = self._scalar_field_from_embedding(elem)
        self._scalar_elem = tuple(elem)
        self._elem_scalar = {x: s for s, x in enumerate(elem)}

    def _scalar_field_from_embedding(self, elem):
        q = self.q
        back = {x: s for s, x in enumerate(elem)}
        add_t = tuple(tuple(back[self.add(elem[a], elem[b])] for b in range(q))
                      for a in range(q))
        mul_t = tuple(tuple(back[self.mul(elem[a], elem[b])] for b in range(q))
                      for a in range(q))
        neg_t = tuple(back[self.neg(elem[a])] for a in range(q))
        inv_t = tuple(0 if a == 0 else back[self.inv(elem[a])] for a in range(q))
        return ScalarField(q, self.p, self.e, q - 1, add_t, mul_t, neg_t, inv_t)

    def _build_coords(self):
        """Change of basis between F_p coefficients of the modulus basis and
        F_q coordinates in the basis {1, omega, ..., omega**(n-1)}."""
        p, d, e, n = self.p, self.degree, self.e, self.n
        cols = []
        for i in range(n):
            for j in range(e):
                x = (i + j * self.q_gen_log) % self.m if self.m else 0
                cols.append(self._pdigits(self.exp[x]))
        # invert the d x d matrix whose columns are cols, over F_p
        aug = []
        for r in range(d):
            row = [cols[c][r] for c in range(d)] + [int(c == r) for c in range(d)]
            aug.append(row)
        piv = 0
        for col in range(d):
            sel = None
            for r in range(piv, d):
                if aug[r][col]:
                    sel = r
                    break
            if sel is None:
                raise ValueError("internal: power basis is not independent over F_q")
            aug[piv], aug[sel] = aug[sel], aug[piv]
            inv = pow(aug[piv][col], p - 2, p)
            aug[piv] = [(v * inv) % p for v in aug[piv]]
            for r in range(d):
                if r != piv and aug[r][col]:
                    c = aug[r][col]
                    aug[r] = [(v - c * w) % p for v, w in zip(aug[r], aug[piv])]
            piv += 1
        if piv != d:
            raise ValueError("internal: power basis is not independent over F_q")
        self._binv = [row[d:] for row in aug]
        if self.e > 1:
            # scalar index of every F_p combination of {1, g, ..., g**(e-1)}
            from itertools import product
            gl = self.q_gen_log
            combos = {}
            for tup in product(range(p), repeat=e):
                x = ZERO
                for j, t in enumerate(tup):
                    if t:
                        gj = (j * gl) % self.m
                        x = self.add(x, self.mul(self._prime_elem(t), gj))
                combos[tup] = self._elem_scalar[x]
            self._fq_combo = combos

    def _prime_elem(self, t: int) -> int:
        """The prime-subfield element t*1 as a tower element."""
        acc = ZERO
        for _ in range(t):
            acc = self.add(acc, 0)
        return acc

    def _pdigits(self, code: int) -> list[int]:
        p, d = self.p, self.degree
        out = [0] * d
        for i in range(d):
            out[i] = code % p
            code //= p
        return out

    # -- arithmetic --------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if a == ZERO:
            return b
        if b == ZERO:
            return a
        m = self.m
        if a > b:
            a, b = b, a
        z = self.zech[(b - a) % m]
        return ZERO if z == ZERO else (a + z) % m

    def neg(self, a: int) -> int:
        if a == ZERO or self.p == 2:
            return a
        return (a + self.m // 2) % self.m

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == ZERO or b == ZERO:
            return ZERO
        return (a + b) % self.m

    def inv(self, a: int) -> int:
        if a == ZERO:
            raise ZeroDivisionError("inverse of zero")
        return (-a) % self.m

    def pow(self, a: int, t: int) -> int:
        if a == ZERO:
            if t <= 0:
                raise ZeroDivisionError("zero to a non-positive power")
            return ZERO
        return (a * t) % self.m

    def element_order(self, a: int) -> int:
        if a == ZERO:
            raise ZeroDivisionError("zero has no multiplicative order")
        return self.m // gcd(self.m, a % self.m) if self.m > 1 else 1

    @property
    def omega(self) -> int:
        """The primitive element; generates the whole multiplicative group."""
        return 1 % self.m if self.m else 0

    @property
    def one(self) -> int:
        return 0

    # -- coordinates and subfields -----------------------------------------

    def coords_over_q(self, x: int) -> tuple[int, ...]:
        """F_q coordinates of x in the basis {1, omega, ..., omega**(n-1)}."""
        p, d, e, n = self.p, self.degree, self.e, self.n
        if x == ZERO:
            return (0,) * n
        digs = self._pdigits(self.exp[x])
        y = [0] * d
        for r in range(d):
            acc = 0
            row = self._binv[r]
            for c in range(d):
                if digs[c]:
                    acc += row[c] * digs[c]
            y[r] = acc % p
        if e == 1:
            return tuple(y)
        return tuple(self._fq_combo[tuple(y[i * e:(i + 1) * e])] for i in range(n))

    def element_from_coords(self, coords) -> int:
        if len(coords) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(coords)}")
        acc = ZERO
        for i, s in enumerate(coords):
            if s:
                acc = self.add(acc, self.mul(self._scalar_elem[s], i % self.m if self.m else 0))
        return acc

    def scalar_to_element(self, s: int) -> int:
        return self._scalar_elem[s]

    def element_to_scalar(self, x: int) -> int:
        """Inverse of scalar_to_element; x must lie in F_q."""
        try:
            return self._elem_scalar[x]
        except KeyError:
            raise ValueError(f"element {x} is not an F_q scalar") from None

    def subfield_basis_qk(self) -> list[int]:
        """The F_q-basis {1, theta, ..., theta**(k-1)} of the middle field,
        theta = omega**N."""
        return [(j * self.N) % self.m if self.m else 0 for j in range(self.k)]

    def in_subfield_qk(self, x: int) -> bool:
        return x == ZERO or x % self.N == 0

    def subfield_qk_nonzero(self) -> list[int]:
        return [(t * self.N) % self.m if self.m else 0 for t in range(self.qk - 1)]

    # -- metadata ------------------------------------------------------------

    def descriptor(self) -> dict:
        return {"p": self.p, "e": self.e, "k": self.k, "n": self.n,
                "modulus": list(self.modulus)}

    def __repr__(self):
        return (f"FieldTower(p={self.p}, e={self.e}, k={self.k}, n={self.n}, "
                f"q={self.q}, N={self.N})")


def build_tower(p: int, e: int, k: int, n: int, *,
                table_cap: int = DEFAULT_TABLE_CAP,
                modulus=None) -> FieldTower:
    """Construct the tower F_p <= F_{p^e} <= F_{p^(e*k)} <= F_{p^(e*n)}.

    The modulus defaults to the deterministic smallest primitive irreducible
    polynomial of degree e*n; passing one explicitly (e.g. from a serialized
    descriptor) revalidates it.
    """
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if e < 1 or k < 1 or n < 1:
        raise ValueError("e, k, n must all be at least 1")
    if n % k != 0:
        raise ValueError(f"k = {k} does not divide n = {n}")
    d = e * n
    if p**d > table_cap:
        raise BudgetExceededError(
            f"field size p^(e*n) = {p**d} exceeds table cap {table_cap}")
    if modulus is None:
        modulus = find_modulus(p, d)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != d + 1 or modulus[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {d}")
        if not (is_irreducible(list(modulus), p) and x_has_full_order(list(modulus), p)):
            raise ValueError("modulus is not a primitive irreducible polynomial")
    return FieldTower(p, e, k, n, modulus, table_cap=table_cap)
