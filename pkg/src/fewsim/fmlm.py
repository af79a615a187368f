"""Fractional multinomial logit crop-share model.

Predicts per-district relative crop areas from price/yield/climate
predictors; coefficients are fitted on a historical share panel by
quasi-maximum likelihood. The first crop in the ordering is the base
category with implicit all-zero coefficients.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .dataset import ClimateFile, StudyAreaDataset

BETA_CLIP = 30.0  # bound protecting against divergence on degenerate panels


class FmlmError(ValueError):
    pass


@dataclass
class FmlmCoefficients:
    crops: list[str]            # ordered, crops[0] is the base category
    predictors: list[str]       # predictor names, "intercept" first
    betas: np.ndarray           # (J-1, K)

    def __post_init__(self):
        self.betas = np.asarray(self.betas, dtype=np.float64)
        J, K = len(self.crops), len(self.predictors)
        if self.betas.shape != (J - 1, K):
            raise FmlmError(
                f"betas shape {self.betas.shape} does not match "
                f"{J - 1} non-base crops x {K} predictors")
        if not np.all(np.isfinite(self.betas)):
            raise FmlmError("non-finite coefficient")


@dataclass
class SharePanel:
    districts: list[str]        # row -> district id
    years: list[int]            # row -> year
    X: np.ndarray               # (N, K)
    Y: np.ndarray               # (N, J) observed shares

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.Y = np.asarray(self.Y, dtype=np.float64)
        if np.any(self.Y < 0):
            raise FmlmError("negative share in panel")
        sums = self.Y.sum(axis=1)
        bad = np.where(np.abs(sums - 1.0) > 1e-9)[0]
        if bad.size:
            raise FmlmError(f"panel row {bad[0]} shares sum to {sums[bad[0]]}, not 1")


@dataclass
class FitResult:
    coefficients: FmlmCoefficients
    loglik: float
    grad_norm: float
    iterations: int
    converged: bool
    degenerate_crops: list[str] = field(default_factory=list)


def fmlm_predict(coefs: FmlmCoefficients, x: np.ndarray) -> np.ndarray:
    """Crop shares for one predictor vector. Strictly positive, sums to 1."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (len(coefs.predictors),):
        raise FmlmError(
            f"predictor vector has length {x.shape}, expected {len(coefs.predictors)}")
    if not np.all(np.isfinite(x)):
        raise FmlmError("non-finite predictor")
    return kernels.softmax_shares_batch(coefs.betas, x[None, :])[0]


def fmlm_fit(panel: SharePanel, crops: list[str], predictors: list[str],
             max_iter: int = 5000, tol: float = 1e-8) -> FitResult:
    """Maximize the multinomial quasi-log-likelihood by gradient ascent.

    Deterministic: zero initialization, full-batch gradient with
    backtracking line search. Non-convergence returns the best iterate
    with converged=False. Crops whose share is identically 0 or 1 across
    the panel are reported as degenerate (their coefficients are clipped).
    """
    if len(crops) < 2:
        raise FmlmError("need at least 2 crops")
    X, Y = panel.X, panel.Y
    if X.shape[0] < 2 or np.unique(X, axis=0).shape[0] < 2:
        raise FmlmError("need at least 2 distinct predictor rows")
    J, K = len(crops), len(predictors)
    if X.shape[1] != K or Y.shape[1] != J:
        raise FmlmError("panel dimensions do not match crops/predictors")

    degenerate = [crops[j] for j in range(J)
                  if np.all(Y[:, j] == 0.0) or np.all(Y[:, j] == 1.0)]

    betas = np.zeros((J - 1, K))
    ll, grad = kernels.fmlm_loglik_grad(betas, X, Y)
    step = 1.0 / max(1.0, float(X.shape[0]))
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        gnorm = float(np.max(np.abs(grad)))
        if gnorm < tol:
            converged = True
            break
        t = step * 4.0  # allow the accepted step to grow between iterations
        accepted = False
        while t > 1e-18:
            cand = np.clip(betas + t * grad, -BETA_CLIP, BETA_CLIP)
            ll_cand = kernels.fmlm_loglik(cand, X, Y)
            if ll_cand >= ll:  # monotone ascent
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break  # no ascent direction left at machine precision
        betas, step = cand, t
        ll, grad = kernels.fmlm_loglik_grad(betas, X, Y)

    gnorm = float(np.max(np.abs(grad)))
    converged = converged or gnorm < tol
    return FitResult(
        coefficients=FmlmCoefficients(list(crops), list(predictors), betas),
        loglik=ll,
        grad_norm=gnorm,
        iterations=iterations,
        converged=converged,
        degenerate_crops=degenerate,
    )


# ---------------------------------------------------------------------------
# predictors

def predictor_names(crops: list[str]) -> list[str]:
    names = ["intercept"]
    names += [f"price_lag_{c}" for c in crops]
    names += [f"yield_lag_{c}" for c in crops]
    names += ["tmean_annual", "precip_annual"]
    return names


def build_predictors(climate: ClimateFile, crops: list[str], year: int,
                     horizon) -> np.ndarray:
    """Predictor vector for one simulated year.

    Price and yield indices enter lagged by one year; temperature is the
    annual mean and precipitation the annual total of the target year.
    """
    lag = year - 1
    lag_block = climate.block_for(lag, horizon)
    block = climate.block_for(year, horizon)
    x = [1.0]
    x += [float(np.mean(lag_block.price_index[c].year_slice(lag))) for c in crops]
    x += [float(np.mean(lag_block.yield_index[c].year_slice(lag))) for c in crops]
    x += [block.annual_mean_temp(year), block.annual_precip(year) / 100.0]
    return np.array(x)


def project_crop_areas(coefs: FmlmCoefficients, dataset: StudyAreaDataset,
                       climate: ClimateFile, district_id: str, year: int) -> dict[str, float]:
    """Per-crop area (ha) for one district-year.

    Predicted shares are masked to the district's allowed crops and
    renormalized, so crops exclusive to another district get zero area.
    """
    district = dataset.district(district_id)
    x = build_predictors(climate, dataset.crop_names(), year, dataset.horizon)
    shares = fmlm_predict(coefs, x)
    # order shares by the dataset crop catalog
    by_crop = dict(zip(coefs.crops, shares))
    names = dataset.crop_names()
    masked = np.array([by_crop[c] if c in district.allowed_crops else 0.0 for c in names])
    total = masked.sum()
    if total > 0:
        masked = masked / total
    return {c: float(masked[i] * district.cropland_ha) for i, c in enumerate(names)}


# ---------------------------------------------------------------------------
# file formats

def save_coefficients(coefs: FmlmCoefficients, path: str | Path) -> None:
    """CSV `crop,predictor,beta`; base-category rows omitted."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["crop", "predictor", "beta"])
        for j, crop in enumerate(coefs.crops[1:]):
            for k, pred in enumerate(coefs.predictors):
                w.writerow([crop, pred, repr(float(coefs.betas[j, k]))])


def load_coefficients(path: str | Path, crops: list[str],
                      predictors: list[str]) -> FmlmCoefficients:
    path = Path(path)
    if not path.exists():
        raise FmlmError(f"coefficients file not found: {path}")
    betas = np.zeros((len(crops) - 1, len(predictors)))
    crop_idx = {c: j for j, c in enumerate(crops[1:])}
    pred_idx = {p: k for k, p in enumerate(predictors)}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            crop, pred = row["crop"], row["predictor"]
            if crop not in crop_idx:
                raise FmlmError(f"unknown (or base) crop {crop!r} in coefficients file")
            if pred not in pred_idx:
                raise FmlmError(f"unknown predictor {pred!r} in coefficients file")
            betas[crop_idx[crop], pred_idx[pred]] = float(row["beta"])
    return FmlmCoefficients(list(crops), list(predictors), betas)


def load_panel(path: str | Path, crops: list[str], predictors: list[str]) -> SharePanel:
    """CSV with columns district,year,<predictor...>,share_<crop>..."""
    path = Path(path)
    if not path.exists():
        raise FmlmError(f"panel file not found: {path}")
    districts, years, X, Y = [], [], [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            districts.append(row["district"])
            years.append(int(row["year"]))
            X.append([float(row[p]) for p in predictors])
            Y.append([float(row[f"share_{c}"]) for c in crops])
    return SharePanel(districts, years, np.array(X), np.array(Y))


def save_panel(panel: SharePanel, crops: list[str], predictors: list[str],
               path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["district", "year"] + predictors + [f"share_{c}" for c in crops])
        for i in range(len(panel.districts)):
            w.writerow([panel.districts[i], panel.years[i]]
                       + [repr(float(v)) for v in panel.X[i]]
                       + [repr(float(v)) for v in panel.Y[i]])


def dataset_coefficients(dataset: StudyAreaDataset) -> FmlmCoefficients:
    """The pre-fitted coefficients bundled with a dataset."""
    if dataset.fmlm_coefficients_file is None or dataset.path is None:
        raise FmlmError("dataset has no bundled coefficients")
    crops = dataset.crop_names()
    # reorder so the configured base crop is first
    base = dataset.fmlm_base_crop
    ordered = [base] + [c for c in crops if c != base]
    return load_coefficients(dataset.path / dataset.fmlm_coefficients_file,
                             ordered, predictor_names(crops))
