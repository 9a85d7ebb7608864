"""Leave-one-patient-out fold plans with a separate development patient."""

from dataclasses import dataclass

from ..exceptions import InputError


@dataclass(frozen=True)
class FoldPlan:
    test_patient: str
    dev_patient: str
    train_patients: tuple

    def __post_init__(self):
        roles = {self.test_patient, self.dev_patient, *self.train_patients}
        if len(roles) != 2 + len(self.train_patients):
            raise InputError("test, dev and train patients must be disjoint")


def next_patient(ordered, test_index):
    """Default development-patient rule: the next patient in sorted order, cyclic."""
    return ordered[(test_index + 1) % len(ordered)]


def make_folds(patient_ids, dev_rule=next_patient):
    """One fold per patient as the held-out test patient.

    ``dev_rule(sorted_patients, test_index)`` picks the development
    patient; everyone else trains.
    """
    ordered = sorted(set(patient_ids))
    if len(ordered) < 3:
        raise InputError(f"need at least 3 patients for train/dev/test folds, got {len(ordered)}")
    folds = []
    for i, test in enumerate(ordered):
        dev = dev_rule(ordered, i)
        if dev == test or dev not in ordered:
            raise InputError(f"dev rule chose invalid patient {dev!r} for test patient {test!r}")
        train = tuple(p for p in ordered if p not in (test, dev))
        folds.append(FoldPlan(test_patient=test, dev_patient=dev, train_patients=train))
    return folds
