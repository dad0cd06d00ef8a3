"""Utils Package"""
