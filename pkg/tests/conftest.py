import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "fast",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("fast")

finite = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


@st.composite
def unit_bloch_vectors(draw):
    v = np.array([draw(finite), draw(finite), draw(finite)])
    norm = np.linalg.norm(v)
    if norm < 0.1:
        v = np.array([1.0, 0.0, 0.0])
        norm = 1.0
    return v / norm


@st.composite
def ball_bloch_vectors(draw):
    v = draw(unit_bloch_vectors())
    return v * draw(st.floats(min_value=0.0, max_value=1.0))


@st.composite
def pure_states(draw):
    re0, im0 = draw(finite), draw(finite)
    re1, im1 = draw(finite), draw(finite)
    v = np.array([re0 + 1j * im0, re1 + 1j * im1])
    norm = np.linalg.norm(v)
    if norm < 0.1:
        return np.array([1.0 + 0j, 0j])
    return v / norm
