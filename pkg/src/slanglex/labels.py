"""Label enums shared by the corpus, classification, and social modules.

Kept in one dependency-free module so that data loading, classifiers, and
evaluation code can all refer to the same label objects without import
cycles.
"""

from __future__ import annotations

import enum

from .errors import SchemaError


class SlangClass(enum.Enum):
    """The four word-formation categories the class detector knows."""

    ALPHABETISM = "Alphabetism"
    BLEND = "Blend"
    CLIPPING = "Clipping"
    REDUPLICATIVE = "Reduplicative"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, text: str) -> "SlangClass":
        for member in cls:
            if member.value.lower() == text.strip().lower():
                return member
        raise SchemaError(f"unknown slang class {text!r}", field="label")


class SubjectLabel(enum.Enum):
    """The ten subject categories used for topic restriction analysis."""

    SEX = "Sex"
    DRUGS = "Drugs"
    MUSIC = "Music"
    NAME = "Name"
    COLLEGE = "College"
    SPORTS = "Sports"
    INTERNET = "Internet"
    RELIGION = "Religion"
    FOOD = "Food"
    WORK = "Work"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, text: str) -> "SubjectLabel":
        for member in cls:
            if member.value.lower() == text.strip().lower():
                return member
        raise SchemaError(f"unknown subject label {text!r}", field="subjects")


class _Rejected(enum.Enum):
    """Singleton open-set outcome, distinct from every known class."""

    REJECTED = "Rejected"

    def __str__(self):
        return self.value


REJECTED = _Rejected.REJECTED
