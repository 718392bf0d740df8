"""Early stopping on consecutive non-improving evaluations."""

from dataclasses import dataclass, field


@dataclass
class EarlyStopper:
    patience: int
    threshold: float = 0.0
    best_metric: float = field(default=float("-inf"), init=False)
    best_step: int = field(default=-1, init=False)
    bad_evals: int = field(default=0, init=False)

    def update(self, metric, step):
        """Record an evaluation; returns True when this one improved."""
        if metric > self.best_metric + self.threshold:
            self.best_metric = metric
            self.best_step = step
            self.bad_evals = 0
            return True
        self.bad_evals += 1
        return False

    @property
    def should_stop(self):
        return self.bad_evals >= self.patience
