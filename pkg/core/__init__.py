"""
Núcleo numérico de la Red de Consenso Jerárquico (HCN)
"""
