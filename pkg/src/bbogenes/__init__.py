"""Biogeography-based gene subset selection with SVM and random-forest fitness."""

from bbogenes.data import Dataset, FoldAssignment, load_csv, load_libsvm, restrict, save_libsvm, stratified_folds
from bbogenes.infogain import GeneRanking, gene_information_gain, label_entropy, rank_genes, sample_informative
from bbogenes.svm import SvmModel, svm_decision, svm_predict, svm_train
from bbogenes.forest import DecisionTree, ForestModel, forest_predict, forest_train, oob_error, tree_grow
from bbogenes.fitness import FitnessCache, FitnessConfig, evaluate_hsi, evaluate_population
from bbogenes.bbo import BboConfig, Ecosystem, Habitat, elitism, init_ecosystem, migrate, mutate, rates, run
from bbogenes.report import RunReport

__version__ = "0.1.0"
