from __future__ import annotations

import io

import pytest

from orgnet.orgmap import load_directory, load_org_chart

# one "PASS/FAIL criterion N: ..." line per acceptance check, echoed at the end
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)

CHART_CSV = """unit_id,name,parent_id,category
LAB,Director,,technical-management
T,Tech Directorate,LAB,technical-management
T-1,Physics Division,T,technical-management
T-1-A,Lasers,T-1,technical-group
T-1-B,Plasma,T-1,technical-group
P,Programs,LAB,technical-program
OPS,Operations,LAB,operations-management
OPS-1,Facilities,OPS,operations-group
ADM,Admin,LAB,administration
"""

DIRECTORY_CSV = """address,unit_id
alice@lab.gov,T-1-A
bob@lab.gov,T-1-A
carol@lab.gov,T-1-B
dave@lab.gov,P
erin@lab.gov,OPS-1
frank@lab.gov,ADM
grace@t.lab.gov,T-1
"""


@pytest.fixture
def chart():
    return load_org_chart(io.StringIO(CHART_CSV))


@pytest.fixture
def directory(chart):
    return load_directory(io.StringIO(DIRECTORY_CSV), chart)
