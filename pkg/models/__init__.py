"""
Data models for COPQ bench.
This package contains the problem instances, circuits, Hamiltonians,
solver results and experiment records shared by the services.
"""
from models.instance import QapInstance, TspInstance, ProblemInstance, PROBLEM_KINDS
from models.circuit import Circuit, Gate, GateKind, ParameterRef, ShotDistribution
from models.hamiltonian import IsingHamiltonian, QuboModel, DecodedSolution
from models.results import (
    AnsatzSpec, FeasibleResult, SaConfig, SolveResult, SpsaConfig, SpsaStep, TrialRecord
)
from models.experiment import ExperimentConfig, ExperimentResult, MetricsSummary, UncertaintySummary

__all__ = [
    'TspInstance',
    'QapInstance',
    'ProblemInstance',
    'PROBLEM_KINDS',
    'Circuit',
    'Gate',
    'GateKind',
    'ParameterRef',
    'ShotDistribution',
    'IsingHamiltonian',
    'QuboModel',
    'DecodedSolution',
    'AnsatzSpec',
    'FeasibleResult',
    'SaConfig',
    'SolveResult',
    'SpsaConfig',
    'SpsaStep',
    'TrialRecord',
    'ExperimentConfig',
    'ExperimentResult',
    'MetricsSummary',
    'UncertaintySummary',
]
