import numpy as np
from hypothesis import strategies as st

from planarspin.minkowski import DEFAULT


@st.composite
def velocities(draw, vmax=0.9):
    """Subluminal planar velocity, uniform in angle."""
    radius = draw(st.floats(0.0, vmax))
    angle = draw(st.floats(0.0, 2 * np.pi))
    return np.array([radius * np.cos(angle), radius * np.sin(angle)])


def vec2(lo=-1.0, hi=1.0):
    comp = st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    return st.tuples(comp, comp).map(np.array)


def vec3(lo=-2.0, hi=2.0):
    comp = st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    return st.tuples(comp, comp, comp).map(np.array)


def unit_timelike(v):
    return np.concatenate([[1.0], v]) / np.sqrt(1.0 - v @ v)


CONV = DEFAULT
