# apps/cli/operations.py
import csv
import json
import logging
import traceback
from pathlib import Path

import jsonschema
import numpy as np
from django.conf import settings

from asymmetry.operations import AsymmetryOperations
from functionals.models import DeficitSpec
from functionals.operations import FunctionalOperations
from geometry.models import NearlySphericalSet
from sphere_basis.models import SphericalFunction, coefficient_count
from sphere_basis.operations import SphereBasisOperations
from utils.exceptions import ArgumentError, IterationError
from verify.models import SampleSpec
from verify.operations import VerificationOperations
from .serializers import RunConfigSerializer, SampleRowSerializer

logger = logging.getLogger(__name__)

CSV_HEADER = list(SampleRowSerializer().fields)
NUMBER_FORMAT = '%.17g'
SUMMARY_SCHEMA = settings.BASE_DIR / 'docs' / 'sweep_summary.schema.json'


def _flatten_errors(errors, prefix=''):
    """Serializer errors as 'field.path: message' lines."""
    lines = []
    if isinstance(errors, dict):
        for key, value in errors.items():
            path = f"{prefix}{key}"
            lines += _flatten_errors(value, f"{path}.")
    elif isinstance(errors, list) and errors and all(isinstance(e, (dict, list)) for e in errors):
        for index, value in enumerate(errors):
            if value:
                lines += _flatten_errors(value, f"{prefix}{index}.")
    else:
        for message in errors if isinstance(errors, list) else [errors]:
            lines.append(f"{prefix.rstrip('.')}: {message}")
    return lines


def _finite(value):
    return float(value) if value is not None and np.isfinite(value) else None


class ConfigOperations:
    """Loading and validation of run configurations"""

    @staticmethod
    def load_json(path):
        try:
            with open(path, encoding='utf-8') as handle:
                return json.load(handle)
        except OSError as e:
            raise ArgumentError(f"Cannot read {path}: {e.strerror}")
        except json.JSONDecodeError as e:
            raise ArgumentError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}")

    @staticmethod
    def validate(data):
        """Resolve a coefficients file, then validate against RunConfigSerializer."""
        data = dict(data)
        path = data.pop('coefficients_file', None)
        if path is not None:
            if data.get('coefficients'):
                raise ArgumentError("Use only one of coefficients, coefficients_file")
            entries = ConfigOperations.load_json(path)
            if not isinstance(entries, list):
                raise ArgumentError(f"{path}: expected a JSON array of {{degree, order, value}} objects")
            data['coefficients'] = entries
        serializer = RunConfigSerializer(data=data)
        if not serializer.is_valid():
            lines = _flatten_errors(serializer.errors)
            logger.warning(f"Rejected run configuration: {lines}")
            raise ArgumentError("Invalid configuration:\n  " + "\n  ".join(lines))
        return dict(serializer.validated_data)

    @staticmethod
    def build_set(config):
        """The set described by inline coefficients, a ball center, or the unit ball."""
        n, L = config['n'], config['L']
        entries = config.get('coefficients')
        if entries:
            coeffs = np.zeros(coefficient_count(n, L))
            for entry in entries:
                coeffs[SphereBasisOperations.coefficient_index(n, entry['degree'], entry['order'])] += entry['value']
            return NearlySphericalSet(SphericalFunction(n, L, coeffs))
        if config.get('ball_center') is not None:
            return AsymmetryOperations.translated_ball(n, config['ball_center'], L=L)
        return NearlySphericalSet.ball(n, L)

    @staticmethod
    def grid(config):
        if config.get('resolution') is None:
            return None
        return SphereBasisOperations.make_grid(config['n'], config['resolution'])


class ReportOperations:
    """CSV rows and JSON summaries of stability sweeps"""

    @staticmethod
    def format_value(value):
        if isinstance(value, float):
            return NUMBER_FORMAT % value
        return str(value)

    @staticmethod
    def write_csv(reports, path):
        with open(path, 'w', newline='', encoding='utf-8') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(CSV_HEADER)
            for report in reports:
                for row in report.rows:
                    data = SampleRowSerializer(
                        {**row.as_dict(), 'check': report.check, 'n': report.n, 'k': report.k, 'm': report.m}
                    ).data
                    writer.writerow([ReportOperations.format_value(data[column]) for column in CSV_HEADER])

    @staticmethod
    def summary(config, reports, sup_report=None):
        levels = [
            {
                'check': report.check,
                'epsilon': report.epsilon,
                'constant': report.constant,
                'eta': report.eta,
                'min_margin': _finite(report.min_margin),
                'passed': report.passed,
                'failures': [list(failure) for failure in report.failures],
                'fitted': {key: _finite(value) for key, value in report.fitted.items()},
            }
            for report in reports
        ]
        sup_norm = None
        if sup_report is not None:
            sup_norm = {
                'epsilons': sup_report.epsilons,
                'max_ratios': [_finite(r) for r in sup_report.max_ratios],
                'log_constant': _finite(sup_report.log_constant),
                'growth_limit': sup_report.growth_limit,
                'excluded': sup_report.excluded,
                'passed': sup_report.passed,
            }
        passed = all(level['passed'] for level in levels) and (sup_report is None or sup_report.passed)
        return {
            'command': 'sweep',
            'n': config['n'],
            'L': config['L'],
            'k': config['k'],
            'm': config['m'],
            'seed': config['seed'],
            'count': config['count'],
            'epsilons': [report.epsilon for report in reports],
            'levels': levels,
            'sup_norm': sup_norm,
            'passed': passed,
        }

    @staticmethod
    def validate_summary(summary):
        """Raise jsonschema.ValidationError unless the summary matches docs/sweep_summary.schema.json."""
        schema = ConfigOperations.load_json(SUMMARY_SCHEMA)
        try:
            jsonschema.validate(instance=summary, schema=schema)
        except jsonschema.ValidationError as e:
            logger.error(f"Sweep summary does not match its schema at {list(e.absolute_path)}: {e.message}")
            logger.error(traceback.format_exc())
            raise

    @staticmethod
    def write_summary(summary, path):
        ReportOperations.validate_summary(summary)
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(summary, handle, indent=2, sort_keys=True)
            handle.write('\n')


class CliOperations:
    """The four quermass commands; each returns an exit status"""

    @staticmethod
    def run(config, out):
        handlers = {
            'info': CliOperations.info,
            'verify': CliOperations.verify,
            'sweep': CliOperations.sweep,
            'asymmetry': CliOperations.asymmetry,
        }
        logger.info(f"Running {config['command']} with n={config['n']} L={config['L']}")
        return handlers[config['command']](config, out)

    @staticmethod
    def _write(out, name, value):
        if isinstance(value, (list, tuple, np.ndarray)):
            text = ' '.join(NUMBER_FORMAT % v for v in value)
        else:
            text = NUMBER_FORMAT % value
        out.write(f"{name}: {text}")

    @staticmethod
    def info(config, out):
        omega = ConfigOperations.build_set(config)
        grid = ConfigOperations.grid(config)
        n = omega.sphere_dim
        write = CliOperations._write
        write(out, 'volume', FunctionalOperations.volume(omega, grid))
        write(out, 'barycenter', FunctionalOperations.barycenter(omega, grid))
        for k in range(n + 1):
            value = FunctionalOperations.curvature_integral(omega, k, grid, check_resolution=grid is not None)
            write(out, f'I_{k}', value)
        for k in range(n + 1):
            for m in range(-1, k):
                write(out, f'delta_{k}_{m}', FunctionalOperations.deficit(omega, DeficitSpec(k, m), grid))
        write(out, 'sup_norms', omega.sup_norms)
        try:
            alpha = AsymmetryOperations.fraenkel_asymmetry(omega, grid, seed=config['seed']).alpha
        except IterationError as e:
            logger.warning(f"Asymmetry search did not converge; reporting best-so-far value {e.best.alpha:.3e}")
            alpha = e.best.alpha
        write(out, 'alpha', alpha)
        return 0

    @staticmethod
    def verify(config, out):
        results = VerificationOperations.run_property_suite(
            n_values=(config['n'],),
            L=config['L'],
            count=config['count'],
            seed=config['seed'],
            resolution=config.get('resolution'),
        )
        for result in results:
            out.write(f"[{'PASS' if result.passed else 'FAIL'}] {result.name}: {result.detail}")
        failed = [result.name for result in results if not result.passed]
        out.write(f"{len(results) - len(failed)}/{len(results)} checks passed")
        return 1 if failed else 0

    @staticmethod
    def sweep(config, out):
        n, L, k, m = config['n'], config['L'], config['k'], config['m']
        reports = []
        try:
            for eps in sorted(config['epsilons'], reverse=True):
                if m == -1:
                    spec = SampleSpec(n=n, L=L, epsilon=eps, count=config['count'], seed=config['seed'])
                    report = VerificationOperations.check_volume_constrained_stability(spec, k, raise_on_failure=False)
                else:
                    spec = SampleSpec(
                        n=n, L=L, epsilon=eps, count=config['count'], seed=config['seed'], mode='quermass', j=m
                    )
                    report = VerificationOperations.check_quermass_constrained_stability(
                        spec, m, k, raise_on_failure=False
                    )
                reports.append(report)
                out.write(
                    f"{report.check} eps={NUMBER_FORMAT % eps}: min margin {NUMBER_FORMAT % report.min_margin} "
                    f"{'PASS' if report.passed else 'FAIL'}"
                )
        except Exception as e:
            logger.error(f"Error running sweep n={n} k={k} m={m}: {str(e)}")
            logger.error(traceback.format_exc())
            raise

        sup_report = None
        if m == -1 and len(reports) > 1:
            sup_report = VerificationOperations.sup_norm_report(
                n, k, [report.epsilon for report in reports], [report.rows for report in reports]
            )
            out.write(f"sup_norm_control: {'PASS' if sup_report.passed else 'FAIL'}")

        output_dir = Path(config.get('output_dir') or settings.QUERMASS['OUTPUT_DIR'])
        output_dir.mkdir(parents=True, exist_ok=True)
        stem = f"sweep_n{n}_k{k}_m{m}_seed{config['seed']}"
        csv_path, summary_path = output_dir / f"{stem}.csv", output_dir / f"{stem}.json"
        summary = ReportOperations.summary(config, reports, sup_report)
        ReportOperations.write_csv(reports, csv_path)
        ReportOperations.write_summary(summary, summary_path)
        out.write(f"rows: {csv_path}")
        out.write(f"summary: {summary_path}")
        return 0 if summary['passed'] else 1

    @staticmethod
    def asymmetry(config, out):
        omega = ConfigOperations.build_set(config)
        grid = ConfigOperations.grid(config)
        status = 0
        try:
            result = AsymmetryOperations.fraenkel_asymmetry(omega, grid, seed=config['seed'])
        except IterationError as e:
            result, status = e.best, 1
            out.write("warning: search did not converge; best-so-far values follow")
        CliOperations._write(out, 'alpha', result.alpha)
        CliOperations._write(out, 'center', result.center)
        CliOperations._write(out, 'radius', result.radius)
        out.write(f"evaluations: {result.evaluations}")
        return status
