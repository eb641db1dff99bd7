from .functionals import BubbleQuery, ckn_K, gaussian_L, talenti_H, truncation

__all__ = ['BubbleQuery', 'ckn_K', 'gaussian_L', 'talenti_H', 'truncation']
