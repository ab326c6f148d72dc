"""Single-instance property checks shared by the unit and acceptance suites.

Each function draws one random instance from ``rng`` and returns the
quantity the caller compares against a tolerance, or ``None`` when the
draw is not applicable.
"""

import math

import numpy as np

from causalinfo import corpus
from causalinfo.criteria import certify_backdoor, direct_causes_adjustment, effect_kernel, max_row_discrepancy
from causalinfo.distribution import JointTable, condition, conditional_mutual_information, marginal
from causalinfo.graph import ancestors_of, d_separated, nondescendants_of, parents_of_set
from causalinfo.information import chain_rule_decomposition
from causalinfo.intervention import dsk, functional_surgery, interventional_global, interventional_marginal
from causalinfo.model import cpt_from_functional, joint_from_cpts

from oracles import cells_to_array, noise_enumeration_joint, random_subset, truncated_by_cells


def random_model(rng, n_min=1, n_max=6, max_card=3):
    return corpus.random_cpt_model(rng, n=int(rng.integers(n_min, n_max + 1)), max_card=max_card)


def random_values(rng, model, S):
    return {v: int(rng.integers(model.cards[v])) for v in S}


def restricted(dag, S):
    """True when no member of ``S`` is an ancestor of a parent of ``S``."""
    pa = parents_of_set(dag, S)
    return not (S & (ancestors_of(dag, pa) | pa))


def nondescendant_invariance(rng):
    model = random_model(rng)
    S = random_subset(rng, range(model.n), 1)
    T = random_subset(rng, nondescendants_of(model.dag, S), 1)
    if T is None:
        return None
    spec = random_values(rng, model, S)
    got = interventional_marginal(model, spec, T).probs
    want = marginal(joint_from_cpts(model), T).probs
    return float(np.max(np.abs(got - want)))


def parent_intervention(rng, singleton=False):
    """Triple equality for the law of ``S`` under interventions on its
    parents, an extra disjoint set, and plain conditioning."""
    model = random_model(rng, n_min=2)
    S = random_subset(rng, range(model.n), 1, 1 if singleton else 3)
    if not restricted(model.dag, S):
        return None
    pa = parents_of_set(model.dag, S)
    spec = random_values(rng, model, pa)
    extra = random_subset(rng, set(range(model.n)) - S - pa, 0, 2)
    extra_spec = {**spec, **random_values(rng, model, extra)}
    a = interventional_marginal(model, extra_spec, S).probs
    b = interventional_marginal(model, spec, S).probs
    joint = joint_from_cpts(model)
    err = float(np.max(np.abs(a - b)))
    if pa:
        if marginal(joint, pa).probs[tuple(spec[v] for v in sorted(pa))] <= 0:
            return err
        c = marginal(condition(joint, spec), S).probs
    else:
        c = marginal(joint, S).probs
    return max(err, float(np.max(np.abs(b - c))))


def dsk_equivalence(rng):
    model = random_model(rng, n_min=2, n_max=5)
    S = random_subset(rng, range(model.n), 0)
    spec = random_values(rng, model, S)
    got = dsk(model, S, spec).probs
    want = interventional_global(model, spec).probs
    return float(np.max(np.abs(got - want)))


def functional_duality(rng):
    fm = corpus.random_functional_model(rng, n=int(rng.integers(1, 6)), max_card=3)
    cpt = cpt_from_functional(fm)
    err = float(np.max(np.abs(joint_from_cpts(cpt).probs - cells_to_array(noise_enumeration_joint(fm), fm.cards))))
    S = random_subset(rng, range(fm.n), 0)
    spec = random_values(rng, fm, S)
    rest = [v for v in range(fm.n) if v not in S]
    enumerated = marginal(_cells_table(noise_enumeration_joint(fm, spec), fm.cards), rest).probs if rest else np.ones(())
    truncated = interventional_global(cpt, spec).probs
    surgered = interventional_global(cpt_from_functional(functional_surgery(fm, spec)), spec).probs
    _, cells = truncated_by_cells(cpt, spec)
    by_cells = cells_to_array(cells, [fm.cards[v] for v in rest]) if rest else np.ones(())
    err = max(err, float(np.max(np.abs(truncated - enumerated))))
    err = max(err, float(np.max(np.abs(surgered - enumerated))))
    err = max(err, float(np.max(np.abs(truncated - by_cells))))
    return err


def _cells_table(cells, cards):
    return JointTable(range(len(cards)), cards, cells_to_array(cells, cards))


def chain_rule(rng, complement=False):
    model = random_model(rng, n_min=2, n_max=5)
    S = random_subset(rng, range(model.n), 1, model.n - 1)
    rest = set(range(model.n)) - S
    T = frozenset(rest) if complement else random_subset(rng, rest, 1)
    terms = chain_rule_decomposition(model, T, S)
    if math.isinf(terms.total):
        return 0.0 if math.isinf(terms.mi_term + terms.cdi_term) else math.inf
    return abs(terms.total - terms.mi_term - terms.cdi_term)


def backdoor_instance(rng, tol=1e-9):
    """(cdi_ok, adjustment_ok, graphical_ok) for one random admissible Z,
    or None when the draw is not applicable."""
    model = random_model(rng, n_min=2, n_max=6)
    S = random_subset(rng, range(model.n), 1, 2)
    pool = set(range(model.n)) - S
    T = random_subset(rng, pool, 1, 2)
    if T is None:
        return None
    Z = random_subset(rng, nondescendants_of(model.dag, S) - T, 0, 3)
    cert = certify_backdoor(model, S, T, Z, tol=tol)
    return cert.information_ok, cert.max_discrepancy <= tol, cert.graphical_ok


def direct_causes(rng):
    model = random_model(rng, n_min=2, n_max=6)
    S = random_subset(rng, range(model.n), 1, 2)
    if not restricted(model.dag, S):
        return None
    pa = parents_of_set(model.dag, S)
    T = random_subset(rng, set(range(model.n)) - S - pa, 1, 2)
    if T is None:
        return None
    adjusted = direct_causes_adjustment(model, S, T)
    truth = effect_kernel(model, S, T)
    return max_row_discrepancy(adjusted, truth, marginal(joint_from_cpts(model), S))


def d_separation_soundness(rng):
    """CMI of a d-separated triple, or None if the draw is not separated."""
    n = int(rng.integers(3, 7))
    model = corpus.random_cpt_model(rng, n=n, max_card=3)
    A = random_subset(rng, range(n), 1, 2)
    B = random_subset(rng, set(range(n)) - A, 1, 2)
    if B is None:
        return None
    Z = random_subset(rng, set(range(n)) - A - B, 0, 3)
    if not d_separated(model.dag, A, B, Z):
        return None
    return conditional_mutual_information(joint_from_cpts(model), A, B, Z)
