"""Closed-form base-to-tip matrix elements for the watering arm.

The twelve expressions below are transcribed as published for the 6-joint
arm, with one repair: the ``p_x`` and ``p_y`` entries lost their opening
parenthesis in print (``3*cos(theta1))/100``) and are read as
``(3*cos(theta1))/100``.

They do not describe the same chain as :func:`hosearm.chain.reference_arm`.
The nine rotation entries equal the DH table evaluated in the proximal
(modified) convention. The three position entries match no reading of the
table. ``element_residuals`` exposes the per-element gap so tests can pin it.
"""

from math import cos, pi, sin

import numpy as np

from .chain import forward_kinematics, reference_arm

ELEMENT_NAMES = ("n_x", "o_x", "a_x", "p_x",
                 "n_y", "o_y", "a_y", "p_y",
                 "n_z", "o_z", "a_z", "p_z")

ROTATION_ELEMENTS = ("n_x", "o_x", "a_x", "n_y", "o_y", "a_y", "n_z", "o_z", "a_z")
POSITION_ELEMENTS = ("p_x", "p_y", "p_z")


def closed_form_elements(q):
    """Evaluate the twelve published expressions; returns ``{name: value}``."""
    t1, t2, t3, t4, t5, t6 = (float(v) for v in q)
    c1, s1 = cos(t1), sin(t1)
    c2, s2 = cos(t2), sin(t2)
    c3m, s3m = cos(t3 - pi / 2), sin(t3 - pi / 2)
    c4, s4 = cos(t4), sin(t4)
    c5p, s5p = cos(t5 + pi / 2), sin(t5 + pi / 2)
    c6, s6 = cos(t6), sin(t6)

    # recurring x-row groups
    gx1 = c1 * s2 * s3m - c1 * c2 * c3m
    gx2 = c1 * c2 * s3m + c1 * c3m * s2
    ux = c4 * gx1 + s4 * gx2
    # recurring y-row groups
    gy1 = c2 * c3m * s1 - s1 * s2 * s3m
    gy2 = c2 * s1 * s3m + c3m * s1 * s2
    uy = c4 * gy1 - s4 * gy2
    # recurring z-row group
    uz = s4 * (c2 * c3m - s2 * s3m) + c4 * (c2 * s3m + c3m * s2)

    e = {}
    e["n_x"] = c6 * (s1 * s5p - c5p * ux) + s6 * (s5p * ux + c5p * s1)
    e["o_x"] = c6 * (s5p * ux + c5p * s1) - s6 * (s1 * s5p - c5p * ux)
    e["a_x"] = c4 * gx2 - s4 * gx1
    e["p_x"] = ((3 * c1) / 100 + (389 * s1) / 1250 + (327 * s1 * s5p) / 2000
                - (327 * c5p * ux) / 2000 + 793 / 10000)

    e["n_y"] = -c6 * (c1 * s5p - c5p * uy) - s6 * (c1 * c5p + s5p * uy)
    e["o_y"] = s6 * (c1 * s5p - c5p * uy) - c6 * (c1 * c5p + s5p * uy)
    e["a_y"] = c4 * gy2 + s4 * gy1
    e["p_y"] = ((3 * s1) / 100 - (389 * c1) / 1250 - (327 * c1 * s5p) / 2000
                + (327 * c5p * uy) / 2000)

    e["n_z"] = c6 * c5p * uz - s6 * s5p * uz
    e["o_z"] = -c6 * s5p * uz - c5p * s6 * uz
    e["a_z"] = s4 * (c2 * s3m + c3m * s2) - c4 * (c2 * c3m - s2 * s3m)
    e["p_z"] = 327 * c5p * uz / 2000
    return e


def closed_form_matrix(q):
    e = closed_form_elements(q)
    M = np.eye(4)
    M[:3, :] = np.array([e[k] for k in ELEMENT_NAMES]).reshape(3, 4)
    return M


def element_residuals(q, reference=None):
    """``{name: |closed form - reference|}``; reference defaults to arm FK."""
    if reference is None:
        reference = forward_kinematics(reference_arm(), q)
    M = closed_form_matrix(q)
    diff = np.abs(M[:3, :] - np.asarray(reference)[:3, :]).reshape(-1)
    return dict(zip(ELEMENT_NAMES, diff.tolist()))


def verify_symbolic_elements(q, reference=None):
    """Max elementwise gap between the closed form and a matrix product."""
    return max(element_residuals(q, reference).values())
