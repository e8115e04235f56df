"""skillrec: skill mining from job vacancies, educational-video fit
prediction, and per-learner video recommendations with online preference
learning."""

__version__ = "0.1.0"
