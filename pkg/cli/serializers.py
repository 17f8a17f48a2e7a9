# apps/cli/serializers.py
import numpy as np
from django.conf import settings
from rest_framework import serializers

from sphere_basis.operations import SphereBasisOperations
from utils.exceptions import ArgumentError

COMMANDS = ('info', 'verify', 'sweep', 'asymmetry')


class CoefficientSerializer(serializers.Serializer):
    """One harmonic coefficient of an input set"""
    degree = serializers.IntegerField(min_value=0)
    order = serializers.IntegerField()
    value = serializers.FloatField()


class RunConfigSerializer(serializers.Serializer):
    """Validated run configuration for the quermass command"""
    command = serializers.ChoiceField(choices=COMMANDS)
    n = serializers.ChoiceField(choices=[1, 2], default=2)
    L = serializers.IntegerField(min_value=0, default=6)
    resolution = serializers.IntegerField(min_value=2, required=False, allow_null=True, default=None)
    k = serializers.IntegerField(min_value=0, default=0)
    m = serializers.IntegerField(min_value=-1, default=-1)
    j = serializers.IntegerField(min_value=0, required=False, allow_null=True, default=None)
    epsilons = serializers.ListField(
        child=serializers.FloatField(min_value=0.0, max_value=0.3),
        allow_empty=False,
        default=lambda: [0.04, 0.02, 0.01],
    )
    count = serializers.IntegerField(min_value=1, default=5)
    seed = serializers.IntegerField(min_value=0, default=0)
    coefficients = CoefficientSerializer(many=True, required=False)
    ball_center = serializers.ListField(child=serializers.FloatField(), required=False, allow_null=True, default=None)
    output_dir = serializers.CharField(required=False, allow_null=True, default=None)

    def validate_L(self, value):
        if value > settings.QUERMASS['MAX_DEGREE']:
            raise serializers.ValidationError(f"Degree above the supported maximum {settings.QUERMASS['MAX_DEGREE']}.")
        return value

    def validate_epsilons(self, value):
        if any(eps <= 0.0 for eps in value):
            raise serializers.ValidationError("Every epsilon must be positive.")
        return value

    def validate(self, attrs):
        # Only declared fields may be provided
        invalid_fields = set(self.initial_data) - set(self.fields)
        if invalid_fields:
            raise serializers.ValidationError(
                {'invalid_fields': f"Unknown configuration keys: {', '.join(sorted(invalid_fields))}"}
            )

        n, L, k = attrs['n'], attrs['L'], attrs['k']
        if k > n:
            raise serializers.ValidationError({'k': f"Order must lie in 0..{n}."})
        if attrs.get('j') is not None:
            if attrs['m'] not in (-1, attrs['j']):
                raise serializers.ValidationError({'j': "Give either m or j, not both."})
            attrs['m'] = attrs['j']
        if not attrs['m'] < k:
            raise serializers.ValidationError({'m': f"Matching order must lie in −1..{k - 1}."})

        if attrs['command'] in ('sweep', 'verify') and L < 2:
            raise serializers.ValidationError({'L': "Sampling uses degrees 2..L; L must be at least 2."})
        if attrs['command'] == 'sweep':
            if not k < n:
                raise serializers.ValidationError({'k': f"Stability sweeps need k < n = {n}."})

        sources = [key for key in ('coefficients', 'ball_center') if attrs.get(key)]
        if len(sources) > 1:
            raise serializers.ValidationError(
                {'coefficients': f"Use only one of {', '.join(sources)}."}
            )
        for index, entry in enumerate(attrs.get('coefficients') or []):
            if entry['degree'] > L:
                raise serializers.ValidationError({'coefficients': f"Entry {index}: degree {entry['degree']} exceeds L={L}."})
            try:
                SphereBasisOperations.coefficient_index(n, entry['degree'], entry['order'])
            except ArgumentError as e:
                raise serializers.ValidationError({'coefficients': f"Entry {index}: {str(e)}"})
        center = attrs.get('ball_center')
        if center is not None:
            if len(center) != n + 1:
                raise serializers.ValidationError({'ball_center': f"Expected {n + 1} components."})
            if np.linalg.norm(center) >= 1.0:
                raise serializers.ValidationError({'ball_center': "The origin must lie inside the ball."})
        return attrs


class SampleRowSerializer(serializers.Serializer):
    """Flat CSV row for one evaluated sample"""
    check = serializers.CharField()
    n = serializers.IntegerField()
    k = serializers.IntegerField()
    m = serializers.IntegerField()
    epsilon = serializers.FloatField()
    index = serializers.IntegerField()
    seed = serializers.IntegerField()
    w2_norm = serializers.FloatField()
    delta = serializers.FloatField()
    alpha = serializers.FloatField()
    alpha_sq = serializers.SerializerMethodField()
    margin = serializers.FloatField()
    u_l2_sq = serializers.FloatField()
    grad_l2_sq = serializers.FloatField()
    u_sup = serializers.FloatField()
    excess = serializers.FloatField()

    def get_alpha_sq(self, obj):
        return obj['alpha'] ** 2
