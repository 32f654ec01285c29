import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from benchrank import Direction, TaskScoreMatrix

TABLE1 = np.array(
    [
        [0.3, 5, 10, 0.02, 1.0, 0.4],
        [0.1, 4, 13, 0.01, 2.2, 0.3],
        [0.0, 3, 15, 0.03, 2.0, 0.2],
    ]
)
TABLE1_CSV = """system,Task1,Task2,Task3,Task4,Task5,Task6
A,0.3,5,10,0.02,1.0,0.4
B,0.1,4,13,0.01,2.2,0.3
C,0.0,3,15,0.03,2.0,0.2
"""


@pytest.fixture
def table1():
    return TaskScoreMatrix(
        TABLE1,
        system_names=["A", "B", "C"],
        task_names=[f"Task{i}" for i in range(1, 7)],
        directions=Direction.LOWER,
    )


@pytest.fixture
def table1_csv(tmp_path):
    path = tmp_path / "table1.csv"
    path.write_text(TABLE1_CSV)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
