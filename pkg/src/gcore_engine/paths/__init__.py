"""Regular path expressions and product-graph search"""
