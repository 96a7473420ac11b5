"""Published reference numbers used by the reproduction commands.

Keys are ``(table, game, condition, metric)``; values are ``(mean, std)``.
Probabilities are stored as fractions, not percentages.
"""

T4 = "table4"
T5 = "table5"

REFERENCE = {
    (T4, "pd", "no_planner", "p_all_c"): (0.00004, 0.00001),
    (T4, "chicken", "no_planner", "p_all_c"): (0.037, 0.013),
    (T4, "stag_hunt", "no_planner", "p_all_c"): (0.00004, 0.00002),
    (T4, "pd", "no_planner", "welfare"): (2.024, 0.003),
    (T4, "chicken", "no_planner", "welfare"): (5.44, 0.01),
    (T4, "stag_hunt", "no_planner", "welfare"): (2.00, 0.00),
    (T4, "pd", "planner", "p_all_c"): (0.987, 0.001),
    (T4, "chicken", "planner", "p_all_c"): (0.990, 0.001),
    (T4, "stag_hunt", "planner", "p_all_c"): (0.991, 0.001),
    (T4, "pd", "planner", "welfare"): (5.975, 0.002),
    (T4, "chicken", "planner", "welfare"): (5.995, 0.001),
    (T4, "stag_hunt", "planner", "welfare"): (5.964, 0.005),
    (T4, "pd", "turn_off", "p_all_c"): (0.0048, 0.004),
    (T4, "chicken", "turn_off", "p_all_c"): (0.538, 0.294),
    (T4, "stag_hunt", "turn_off", "p_all_c"): (0.996, 0.000),
    (T4, "pd", "turn_off", "welfare"): (2.60, 0.69),
    (T4, "chicken", "turn_off", "welfare"): (5.728, 0.174),
    (T4, "stag_hunt", "turn_off", "welfare"): (5.986, 0.002),
    (T5, "pd", "exact", "p_all_c"): (0.987, 0.001),
    (T5, "chicken", "exact", "p_all_c"): (0.990, 0.001),
    (T5, "stag_hunt", "exact", "p_all_c"): (0.991, 0.001),
    (T5, "pd", "exact", "aar"): (0.77, 0.21),
    (T5, "chicken", "exact", "aar"): (0.41, 0.02),
    (T5, "stag_hunt", "exact", "aar"): (0.45, 0.02),
    (T5, "pd", "revenue_neutral", "p_all_c"): (0.914, 0.010),
    (T5, "chicken", "revenue_neutral", "p_all_c"): (0.989, 0.001),
    (T5, "stag_hunt", "revenue_neutral", "p_all_c"): (0.692, 0.453),
    (T5, "pd", "revenue_neutral", "aar"): (0.61, 0.04),
    (T5, "chicken", "revenue_neutral", "aar"): (0.31, 0.02),
    (T5, "stag_hunt", "revenue_neutral", "aar"): (0.19, 0.11),
    (T5, "pd", "estimated", "p_all_c"): (0.613, 0.200),
    (T5, "chicken", "estimated", "p_all_c"): (0.522, 0.186),
    (T5, "stag_hunt", "estimated", "p_all_c"): (0.960, 0.012),
    (T5, "pd", "estimated", "aar"): (3.31, 0.63),
    (T5, "chicken", "estimated", "aar"): (2.65, 0.31),
    (T5, "stag_hunt", "estimated", "aar"): (4.89, 0.39),
}


def reference(table: str, game: str, condition: str, metric: str):
    """``(mean, std)`` or ``None`` when nothing was published for that cell."""
    return REFERENCE.get((table, game, condition, metric))
