"""Synthetic daily-activity exports in the Fitbit ``dailyActivity_merged.csv`` layout.

Useful for demos and end-to-end tests when the real export is not at hand.
Users are drawn from a few activity archetypes so the data has cluster
structure, and ``TrackerDistance`` duplicates ``TotalDistance`` as it does in
real exports.
"""

import csv
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .ingest import FITBIT_COLUMNS

# (mean daily steps, share of active minutes that are "very active", sedentary minutes)
ARCHETYPES = {
    "sedentary": (2500.0, 0.05, 1250.0),
    "light": (6500.0, 0.10, 1050.0),
    "active": (10000.0, 0.25, 800.0),
    "athlete": (15000.0, 0.45, 700.0),
}

# 21 users with a full month plus 12 partial ones: 940 user-days
DEFAULT_DAYS = (31,) * 21 + (30, 29, 29, 28, 26, 26, 25, 20, 19, 18, 21, 18)

STRIDE_KM = 0.00075


def generate_rows(n_users: int = 33, days_per_user=DEFAULT_DAYS, seed: int = 0,
                  start: date = date(2016, 4, 12)) -> list:
    """Rows as dicts keyed by the Fitbit column names."""
    rng = np.random.default_rng(seed)
    if len(days_per_user) != n_users:
        days_per_user = [int(d) for d in rng.integers(10, 32, size=n_users)]
    kinds = list(ARCHETYPES)
    ids = sorted({int(v) for v in rng.integers(1_000_000_000, 9_999_999_999, size=4 * n_users)})[:n_users]
    rows = []
    for i, (uid, n_days) in enumerate(zip(ids, days_per_user)):
        steps_mu, very_share, sed_mu = ARCHETYPES[kinds[i % len(kinds)]]
        steps_mu *= rng.uniform(0.85, 1.15)
        bmr = rng.uniform(1400.0, 2100.0)
        for d in range(n_days):
            steps = max(0.0, rng.normal(steps_mu, 0.25 * steps_mu))
            if rng.random() < 0.04:
                steps = 0.0  # device not worn
            total_km = round(steps * STRIDE_KM * rng.uniform(0.9, 1.1), 2)
            share = np.clip(rng.normal(very_share, 0.05), 0.0, 0.9)
            very_km = round(total_km * share, 2)
            moderate_km = round(total_km * np.clip(rng.normal(0.1, 0.03), 0.0, 1.0 - share), 2)
            light_km = round(max(0.0, total_km - very_km - moderate_km), 2)
            active_min = steps / 110.0
            very_min = int(round(active_min * share))
            fairly_min = int(round(active_min * 0.1))
            light_min = int(round(max(0.0, active_min - very_min - fairly_min) * 1.6))
            sed_min = int(np.clip(rng.normal(sed_mu, 90.0), 0.0, 1440 - very_min - fairly_min - light_min))
            calories = int(round(bmr + 0.045 * steps + 4.0 * very_min + rng.normal(0.0, 80.0)))
            logged = round(rng.uniform(0.5, 4.0), 2) if rng.random() < 0.03 else 0.0
            day = start + timedelta(days=d)
            rows.append({
                "Id": uid,
                "ActivityDate": f"{day.month}/{day.day}/{day.year}",
                "TotalSteps": int(round(steps)),
                "TotalDistance": total_km,
                "TrackerDistance": total_km,
                "LoggedActivitiesDistance": logged,
                "VeryActiveDistance": very_km,
                "ModeratelyActiveDistance": moderate_km,
                "LightActiveDistance": light_km,
                "SedentaryActiveDistance": round(rng.uniform(0.0, 0.02), 2),
                "VeryActiveMinutes": very_min,
                "FairlyActiveMinutes": fairly_min,
                "LightlyActiveMinutes": light_min,
                "SedentaryMinutes": sed_min,
                "Calories": max(calories, 0),
            })
    return rows


def write_daily_activity_csv(path, n_users: int = 33, days_per_user=DEFAULT_DAYS, seed: int = 0) -> Path:
    path = Path(path)
    rows = generate_rows(n_users, days_per_user, seed)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(FITBIT_COLUMNS), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return path
