import time
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

SETUP = "setup"
DISPARITY_DEPTH = "Setup Disparity Map and Calculating Depth"
IMAGE_LOAD = "Loading of Images"
DETECTION = "Classifying and detecting object"
CUMULATIVE = "Cumulative time to run one instance of solution"

PER_FRAME_TASKS = (DISPARITY_DEPTH, IMAGE_LOAD, DETECTION)


@dataclass
class TimingReport:
    """Average seconds per task, in the fixed row order."""
    rows: List[Tuple[str, float]] = field(default_factory=list)

    def as_dict(self) -> Dict[str, float]:
        return dict(self.rows)

    def to_csv(self) -> str:
        return "task,seconds\n" + "".join(f"{name},{seconds:.3f}\n" for name, seconds in self.rows)

    def render(self) -> str:
        width = max(len(name) for name, _ in self.rows)
        lines = ["=" * 60, "Timing (average seconds)", "=" * 60]
        lines += [f"{name:<{width}}  {seconds:8.3f}" for name, seconds in self.rows]
        lines.append("=" * 60)
        return "\n".join(lines)


class StageTimer:
    """Collects monotonic-clock durations per task."""

    def __init__(self):
        self.setup_seconds = 0.0
        self.samples: Dict[str, List[float]] = {task: [] for task in PER_FRAME_TASKS}

    def measure(self, task: str):
        return _Measurement(self, task)

    def record(self, task: str, seconds: float):
        if task == SETUP:
            self.setup_seconds += seconds
        else:
            self.samples[task].append(seconds)

    def report(self) -> TimingReport:
        means = {task: (sum(s) / len(s) if s else 0.0) for task, s in self.samples.items()}
        cumulative = self.setup_seconds + sum(means.values())
        rows = [
            (SETUP, self.setup_seconds),
            (DISPARITY_DEPTH, means[DISPARITY_DEPTH]),
            (IMAGE_LOAD, means[IMAGE_LOAD]),
            (DETECTION, means[DETECTION]),
            (CUMULATIVE, cumulative),
        ]
        return TimingReport([(name, round(max(seconds, 0.0), 3)) for name, seconds in rows])


class _Measurement:
    def __init__(self, timer: StageTimer, task: str):
        self.timer = timer
        self.task = task

    def __enter__(self):
        self.start = time.monotonic()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        # Failed stages still count toward the average
        self.timer.record(self.task, time.monotonic() - self.start)
        return False
