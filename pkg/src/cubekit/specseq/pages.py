"""Pages Z^r, B^r, E^r, the differentials d^r and the page-level checks."""

from __future__ import annotations

from .couple import ExactCouple, Report, WindowError
from .engines import IllDefined, NotInImage


class Pages:
    """Memoized page data of one couple."""

    def __init__(self, C: ExactCouple):
        self.C = C
        self.eng = C.eng
        self._Z: dict = {}
        self._B: dict = {}
        self._d: dict = {}
        self.overrides: dict = {}

    def Z(self, r: int, p: int, q: int):
        if r < 1:
            raise ValueError("pages start at r = 1")
        key = (r, p, q)
        if key not in self._Z:
            C, eng = self.C, self.eng
            E = C.E(p, q)
            if r == 1 or eng.is_zero(E):
                out = eng.whole(E)
            else:
                src, mid = C.D(p - r, q + r - 1), C.D(p - 1, q)
                im = eng.image(C.i_power(p - r, q + r - 1, r - 1), src, mid, eng.whole(src))
                out = eng.preimage(C.k(p, q), E, mid, im)
            self._Z[key] = out
        return self._Z[key]

    def B(self, r: int, p: int, q: int):
        if r < 1:
            raise ValueError("pages start at r = 1")
        key = (r, p, q)
        if key not in self._B:
            C, eng = self.C, self.eng
            E = C.E(p, q)
            if r == 1 or eng.is_zero(E):
                out = eng.trivial(E)
            else:
                D = C.D(p, q)
                ker = eng.kernel(C.i_power(p, q, r - 1), D, C.D(p + r - 1, q - r + 1))
                out = eng.image(C.j(p, q), D, E, ker)
            self._B[key] = out
        return self._B[key]

    def E_quotient(self, r: int, p: int, q: int):
        """Z^r/B^r; only formed for q >= 1."""
        if q < 1:
            return None
        return self.eng.quotient(self.C.E(p, q), self.Z(r, p, q), self.B(r, p, q))

    def target(self, r, p, q):
        return p - r, q + r - 1

    def differential(self, r: int, p: int, q: int):
        """d^r_{p,q} on Z^r_{p,q} as an engine relation, modulo B^r at the target."""
        if q < 0 or p < 0:
            raise ValueError("d^r is only defined for p, q >= 0")
        key = (r, p, q)
        if key in self.overrides:
            return self.overrides[key]
        if key not in self._d:
            C, eng = self.C, self.eng
            tp, tq = self.target(r, p, q)
            self._d[key] = eng.zigzag(
                C.k(p, q), C.i_power(tp, tq, r - 1), C.j(tp, tq),
                C.E(p, q), C.D(p - 1, q), C.D(tp, tq), C.E(tp, tq),
                self.Z(r, p, q), self.B(r, tp, tq))
        return self._d[key]

    def ker_d(self, r, p, q):
        tp, tq = self.target(r, p, q)
        return self.eng.rep_kernel(self.differential(r, p, q), self.C.E(p, q), self.C.E(tp, tq),
                                   self.B(r, tp, tq))

    def im_d(self, r, p, q):
        """Image of d^r_{p,q}, saturated by B^r at the target."""
        tp, tq = self.target(r, p, q)
        return self.eng.rep_image(self.differential(r, p, q), self.C.E(tp, tq), self.B(r, tp, tq))

    def incoming_image(self, r, p, q):
        """Image of d^r into (p,q), saturated with B^r_{p,q}."""
        sp, sq = p + r, q - r + 1
        if sq < 0 or self.eng.is_zero(self.C.E(sp, sq)):
            return self.B(r, p, q)
        return self.im_d(r, sp, sq)

    def page(self, r: int) -> dict:
        """Summary of page r over the support of E."""
        out = {}
        for (p, q) in self.C.support_E():
            try:
                entry = {"Z": self.eng.describe_sub(self.C.E(p, q), self.Z(r, p, q)),
                         "B": self.eng.describe_sub(self.C.E(p, q), self.B(r, p, q))}
                Eq = self.E_quotient(r, p, q)
                entry["E"] = None if Eq is None else Eq.to_json()
            except WindowError:
                entry = {"skipped": "window"}
            out[f"{p},{q}"] = entry
        return out


def page(C: ExactCouple, r: int) -> dict:
    return Pages(C).page(r)


def differential(C: ExactCouple, r: int, p: int, q: int, pages: Pages | None = None):
    return (pages or Pages(C)).differential(r, p, q)


def _coord(p, q):
    return f"{p},{q}"


def page_checks(C: ExactCouple, r_max: int, pages: Pages | None = None) -> Report:
    """Inclusion chain, d^1 = j k, ker d^r = Z^{r+1}, im d^r = B^{r+1}, d d = 0."""
    P = pages or Pages(C)
    eng = C.eng
    rep = Report()
    for (p, q) in C.support_E():
        E = C.E(p, q)
        try:
            if not eng.equal(E, P.Z(1, p, q), eng.whole(E)) or not eng.is_trivial_sub(E, P.B(1, p, q)):
                rep.fail(type="page1", node=_coord(p, q))
            for r in range(1, r_max + 1):
                rep.checked += 1
                if not eng.contains(E, P.Z(r, p, q), P.Z(r + 1, p, q)):
                    rep.fail(type="Z_chain", node=_coord(p, q), r=r)
                if not eng.contains(E, P.B(r + 1, p, q), P.B(r, p, q)):
                    rep.fail(type="B_chain", node=_coord(p, q), r=r)
                if not eng.contains(E, P.Z(r_max + 1, p, q), P.B(r, p, q)):
                    rep.fail(type="B_in_Z", node=_coord(p, q), r=r)
        except WindowError:
            continue
    for (p, q) in C.support_E():
        for r in range(1, r_max + 1):
            tp, tq = P.target(r, p, q)
            try:
                d = P.differential(r, p, q)
            except WindowError:
                continue
            except (NotInImage, IllDefined) as exc:
                rep.fail(type="differential", node=_coord(p, q), r=r, detail=str(exc))
                continue
            E, T = C.E(p, q), C.E(tp, tq)
            rep.checked += 1
            if r == 1:
                jk = eng.compose(C.j(p - 1, q), C.k(p, q))
                if not _matches_composite(eng, d, jk, E, T):
                    rep.fail(type="d1_not_jk", node=_coord(p, q))
            if not eng.equal(E, P.ker_d(r, p, q), P.Z(r + 1, p, q)):
                rep.fail(type="ker_d_neq_Z", node=_coord(p, q), r=r)
            if tp >= 0 and not eng.is_zero(T):
                if not eng.equal(T, P.im_d(r, p, q), P.B(r + 1, tp, tq)):
                    rep.fail(type="im_d_neq_B", node=_coord(p, q), r=r)
                if not eng.contains(T, P.ker_d(r, tp, tq), P.im_d(r, p, q)):
                    rep.fail(type="dd_nonzero", node=_coord(p, q), r=r)
    return rep


def _matches_composite(eng, d, jk, E, T) -> bool:
    if eng.name == "group":
        M = eng.rep_values(d, T)
        return T.contains(T.trivial_sub(), M - jk @ d["Z"])
    return all(vals == [jk[z]] for z, vals in d.items())


def homology_step_check(C: ExactCouple, r: int, pages: Pages | None = None) -> Report:
    """E^{r+1}_{p,q} against ker d^r_{p,q} / im d^r_{p+r,q-r+1} for q >= 1."""
    P = pages or Pages(C)
    eng = C.eng
    rep = Report()
    for (p, q) in C.support_E():
        if q < 1:
            continue
        try:
            lhs = P.E_quotient(r + 1, p, q)
            rhs = eng.quotient(C.E(p, q), P.ker_d(r, p, q), P.incoming_image(r, p, q))
        except WindowError:
            continue
        except (NotInImage, IllDefined, ValueError) as exc:
            rep.fail(type="homology_step", node=_coord(p, q), r=r, detail=str(exc))
            continue
        rep.checked += 1
        rep.details[_coord(p, q)] = {"E_next": lhs.text, "H": rhs.text}
        if lhs != rhs:
            rep.fail(type="homology_step", node=_coord(p, q), r=r, E_next=lhs.text, H=rhs.text)
    return rep


def stabilization(C: ExactCouple, r_max: int, pages: Pages | None = None) -> dict:
    """First r from which Z^r and B^r stay constant up to r_max."""
    P = pages or Pages(C)
    eng = C.eng
    out = {}
    for (p, q) in C.support_E():
        E = C.E(p, q)
        try:
            rz = rb = r_max
            while rz > 1 and eng.equal(E, P.Z(rz - 1, p, q), P.Z(r_max, p, q)):
                rz -= 1
            while rb > 1 and eng.equal(E, P.B(rb - 1, p, q), P.B(r_max, p, q)):
                rb -= 1
        except WindowError:
            continue
        out[(p, q)] = {"Z": rz, "B": rb}
    return out


def convergence_check(C: ExactCouple, r_inf: int, pages: Pages | None = None) -> Report:
    """Z^inf/B^inf against F_{p,q}/F_{p-1,q+1} inside D_{p+q+1,-1}."""
    P = pages or Pages(C)
    eng = C.eng
    rep = Report()
    for (p, q) in C.window.points():
        if p < 0 or q < 0 or p + q < 2:
            continue
        try:
            E, D = C.E(p, q), C.D(p, q)
            col = C.D(p + q + 1, -1)
            I = C.i_power(p, q, q + 1)
            Dl = C.D(p - 1, q + 1)
            F = eng.image(I, D, col, eng.whole(D))
            Fl = eng.image(C.i_power(p - 1, q + 1, q + 2), Dl, col, eng.whole(Dl))
            Zi, Bi = P.Z(r_inf, p, q), P.B(r_inf, p, q)
        except WindowError:
            continue
        rep.checked += 1
        if not eng.contains(col, F, Fl):
            rep.fail(type="filtration_not_nested", node=_coord(p, q))
            continue
        try:
            comp = eng.zigzag(eng.identity(E), C.j(p, q), I, E, E, D, col, Zi, Fl)
        except (IllDefined, NotInImage) as exc:
            rep.fail(type="comparison_ill_defined", node=_coord(p, q), detail=str(exc))
            continue
        ker = eng.rep_kernel(comp, E, col, Fl)
        im = eng.rep_image(comp, col, Fl)
        lhs = eng.quotient(E, Zi, Bi)
        rhs = eng.quotient(col, F, Fl)
        if lhs.size != 1 or rhs.size != 1:
            rep.details[_coord(p, q)] = {"E_inf": lhs.text, "gr": rhs.text}
        if not eng.equal(E, ker, Bi):
            rep.fail(type="comparison_kernel", node=_coord(p, q))
        if not eng.equal(col, im, F):
            rep.fail(type="comparison_not_onto", node=_coord(p, q))
        if lhs != rhs:
            rep.fail(type="quotient_mismatch", node=_coord(p, q), E_inf=lhs.text, gr=rhs.text)
    return rep
