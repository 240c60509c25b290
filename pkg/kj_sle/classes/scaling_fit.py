from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.stats import pearsonr
from sklearn.linear_model import LinearRegression
from sklearn.metrics import r2_score


@dataclass
class ScalingFit:
    slope: float  # fitted slope of y against x
    intercept: float  # fitted intercept
    r2: float  # R-squared of the affine fit
    pearson_r: float  # Pearson correlation coefficient
    p_value: float  # p-value of the Pearson correlation
    ratio_spread: float  # max(y/x) / min(y/x), the spread of a pure proportional model

    def to_dict(self) -> Dict[str, float]:
        """
        Convert the ScalingFit dataclass to a dictionary.

        Returns:
            Dict[str, float]: A dictionary representation of the fit.
        """
        return dict(self.__dict__)

    @classmethod
    def calc(cls, x: pd.Series, y: pd.Series) -> "ScalingFit":
        """
        Fit y = slope * x + intercept, e.g. query counts against a complexity shape.

        Args:
            x (pd.Series): The shape values, all positive.
            y (pd.Series): The measured counts.

        Returns:
            ScalingFit: Fit coefficients and quality metrics.

        Raises:
            ValueError: If the series contain NaN values, differ in length, or have fewer than 3 points.
        """
        if x.isnull().any() or y.isnull().any():
            raise ValueError("Input series must not contain NaN values.")
        if len(x) != len(y) or len(x) < 3:
            raise ValueError("Need at least three paired observations.")

        features = x.to_numpy(dtype=float).reshape(-1, 1)
        target = y.to_numpy(dtype=float)
        model = LinearRegression().fit(features, target)
        predicted = model.predict(features)
        r2 = r2_score(target, predicted)
        if np.ptp(target) == 0 or np.ptp(features) == 0:
            pearson_r, p_value = float("nan"), float("nan")
        else:
            pearson_r, p_value = pearsonr(features[:, 0], target)
        ratios = target / features[:, 0]
        return cls(float(model.coef_[0]), float(model.intercept_), float(r2), float(pearson_r),
                   float(p_value), float(np.max(ratios) / np.min(ratios)))

    def check_thresholds(self, metrics_warning: Dict[str, Tuple[Optional[float], Optional[float]]]) -> List[str]:
        """
        Check if metrics fall outside the provided ranges.

        Args:
            metrics_warning: Metric name mapped to (lower_threshold, upper_threshold); None disables a side.

        Returns:
            List[str]: Warning messages, empty when all metrics are in range.
        """
        warnings = []
        for metric, (lower_threshold, upper_threshold) in metrics_warning.items():
            metric_value = getattr(self, metric)
            if (lower_threshold is not None and metric_value < lower_threshold) or \
               (upper_threshold is not None and metric_value > upper_threshold):
                warnings.append(f"Metric '{metric}' value {metric_value:.4f} outside of threshold range "
                                f"{lower_threshold}-{upper_threshold}")
        return warnings
