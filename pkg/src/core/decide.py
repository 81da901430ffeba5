from dataclasses import dataclass, field
from functools import wraps
from typing import Any, Iterable, Mapping, Optional

import numpy as np
import pandas as pd

from core.calculation_thread import CalculationThread
from core.cellauto import CellularAutomaton, compose_relabel, image_automaton, image_block_shift, sft_cover
from core.ftauto import FiniteTreeAutomaton, complement_of_shift, fta_witness
from core.logger_config import logger
from core.oracles import BruteForce
from core.rabin import (RabinAutomaton, RegularConfigurationMachine, accepted_blocks, essential_mask, essentialize,
                        join, sub_automaton, xi_machine)
from core.shiftspec import SftSpec, presentation
from core.treecore import Pattern, format_pattern

DECIDE_DEFAULT_KWARGS = {
    'oracle': False,
    'workers': 1,
}


def add_default_kwargs(func):
    @wraps(func)
    def wrapper(*args, **kwargs):
        for key, value in DECIDE_DEFAULT_KWARGS.items():
            kwargs.setdefault(key, value)
        logger.debug(f"Вызов {func.__name__} с параметрами: {kwargs}")
        return func(*args, **kwargs)
    return wrapper


@dataclass(frozen=True)
class InjectivityCertificate:
    """Two distinct regular preimages of one regular image configuration."""
    states: tuple[str, str]
    image: RegularConfigurationMachine
    preimages: tuple[RegularConfigurationMachine, RegularConfigurationMachine]


@dataclass(frozen=True)
class Verdict:
    answer: bool
    witness: Optional[Pattern] = None
    certificate: Optional[InjectivityCertificate] = None
    stats: Mapping[str, Any] = field(default_factory=dict, compare=False)


def _search(B: FiniteTreeAutomaton, oracle: bool) -> Optional[Pattern]:
    return BruteForce.fta_witness(B) if oracle else fta_witness(B)


def _difference_ftas(C1: FiniteTreeAutomaton,
                     C2: FiniteTreeAutomaton) -> tuple[FiniteTreeAutomaton, FiniteTreeAutomaton]:
    """Patterns of the first shift missing from the second, and the other way round."""
    base = join(C1.base, C2.base)
    width = C2.base.num_states
    first, second = range(C1.base.num_states), range(width)
    only_first = frozenset(i * width + j for i in first if i not in C1.initial for j in second if j in C2.initial)
    only_second = frozenset(i * width + j for i in first if i in C1.initial for j in second if j not in C2.initial)
    final = C1.final * width + C2.final
    return FiniteTreeAutomaton(base, only_first, final), FiniteTreeAutomaton(base, only_second, final)


@add_default_kwargs
def equal_shifts(A1: RabinAutomaton, A2: RabinAutomaton, **kwargs) -> Verdict:
    if A1.signature != A2.signature or A1.alphabet != A2.alphabet:
        raise ValueError("equal_shifts needs automata with the same arity and alphabet")
    oracle = kwargs['oracle']
    C1, C2 = complement_of_shift(A1), complement_of_shift(A2)
    differences = _difference_ftas(C1, C2)

    if kwargs['workers'] > 1:
        threads = [CalculationThread(_search, B, oracle) for B in differences]
        for thread in threads:
            thread.start()
        witnesses = [thread.result_ready() for thread in threads]
    else:
        witnesses = [_search(B, oracle) for B in differences]

    found = [w for w in witnesses if w is not None]
    witness = min(found, key=lambda p: p.height) if found else None
    stats = {
        'complement_states': (C1.base.num_states, C2.base.num_states),
        'difference_states': differences[0].base.num_states,
        'difference_bundles': len(differences[0].base.bundles),
    }
    logger.info(f"Сравнение сдвигов: {'равны' if witness is None else 'различны'}")
    return Verdict(witness is None, witness, stats=stats)


@add_default_kwargs
def is_full(A: RabinAutomaton, **kwargs) -> Verdict:
    complement = complement_of_shift(A)
    witness = _search(complement, kwargs['oracle'])
    logger.info(f"Проверка полноты: {'полный' if witness is None else 'не полный'}")
    return Verdict(witness is None, witness, stats={'complement_states': complement.base.num_states})


@add_default_kwargs
def decide_surjective(tau: CellularAutomaton, Y: RabinAutomaton | SftSpec,
                      X_presentation: Optional[RabinAutomaton] = None, **kwargs) -> Verdict:
    target = presentation(Y) if isinstance(Y, SftSpec) else Y
    if X_presentation is not None:
        _, labeling = sft_cover(essentialize(X_presentation))
        image = image_automaton(compose_relabel(tau, labeling))
    else:
        image = image_automaton(tau)
    if image.alphabet != target.alphabet or image.signature != target.signature:
        raise ValueError("the image and the target shift live over different alphabets")
    verdict = equal_shifts(image, target, **kwargs)
    stats = dict(verdict.stats, image_states=image.num_states, image_bundles=len(image.bundles))
    logger.info(f"Сюръективность: {verdict.answer}")
    return Verdict(verdict.answer, verdict.witness, stats=stats)


def decide_injective(tau: CellularAutomaton) -> Verdict:
    shift = image_block_shift(tau)
    image = shift.relabel(tau.lifted_rule, tau.target)
    pairs = join(image, image)
    mask = essential_mask(pairs)
    width = image.num_states
    stats = {'image_states': width, 'essential_pairs': int(mask.sum())}
    pair = next((int(i) for i in np.flatnonzero(mask) if i // width != i % width), None)
    if pair is None:
        logger.info("Инъективность: да")
        return Verdict(True, stats=stats)

    machine = xi_machine(sub_automaton(pairs, mask), pairs.states[pair])
    raw_index = {name: i for i, name in enumerate(pairs.states)}

    def preimage(component: int) -> RegularConfigurationMachine:
        colors = []
        for name in machine.states:
            first, second = divmod(raw_index[name], width)
            colors.append(shift.state_blocks[second if component else first].label)
        return RegularConfigurationMachine(tau.domain.signature, tau.domain.alphabet, machine.states,
                                           machine.root, tuple(colors), machine.steps)

    first, second = divmod(pair, width)
    certificate = InjectivityCertificate((image.states[first], image.states[second]), machine,
                                         (preimage(0), preimage(1)))
    logger.info(f"Инъективность: нет, пара состояний {pairs.states[pair]}")
    return Verdict(False, certificate=certificate, stats=stats)


@add_default_kwargs
def surjunctivity_check(tau: CellularAutomaton, **kwargs) -> Verdict:
    X = tau.domain
    if tau.target != X.alphabet:
        raise ValueError("surjunctivity is checked for endomorphisms only")
    if X.forbidden:
        leaked = accepted_blocks(image_automaton(tau), X.memory) & X.forbidden
        if leaked:
            sample = min(format_pattern(block, X.alphabet) for block in leaked)
            raise ValueError(f"image of the cellular automaton leaves its domain: {sample}")
    injective = decide_injective(tau).answer
    surjective = decide_surjective(tau, presentation(X), **kwargs).answer
    violation = injective and not surjective
    if violation:
        logger.error("Найден инъективный, но не сюръективный клеточный автомат")
    return Verdict(not violation, stats={'injective': injective, 'surjective': surjective})


def surjunctivity_survey(cases: Iterable[tuple[str, CellularAutomaton]], **kwargs) -> pd.DataFrame:
    rows = []
    for name, tau in cases:
        verdict = surjunctivity_check(tau, **kwargs)
        rows.append({
            'case': name,
            'arity': tau.domain.signature.arity,
            'memory': tau.memory,
            'rules': len(tau.table),
            'injective': verdict.stats['injective'],
            'surjective': verdict.stats['surjective'],
            'violation': not verdict.answer,
        })
    survey = pd.DataFrame(rows, columns=['case', 'arity', 'memory', 'rules', 'injective', 'surjective', 'violation'])
    logger.debug(f"Обзор сюръюнктивности: {len(survey)} автоматов, нарушений {int(survey['violation'].sum())}")
    return survey
