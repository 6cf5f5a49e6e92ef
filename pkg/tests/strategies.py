"""Shared hypothesis strategies over the physical parameter box."""

from hypothesis import strategies as st

from ladderfl import Params

omega = st.floats(0.0, 60.0)
delta = st.floats(-80.0, 80.0)
xi = st.floats(0.5, 2.0)


@st.composite
def params(draw, min_omega: float = 0.0):
    return Params(
        omega=draw(st.floats(min_omega, 60.0)),
        alpha=-120.0,
        delta=draw(delta),
        xi=draw(xi),
    )


XI_SET = (2**-0.5, 1.0, 2**0.5)
