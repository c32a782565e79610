for (i = 0; i <= m; i++) {
  D[i][0] = B[i-1][1] * C[i-1][-1];
  for (j = 0; j <= n-1; j++) {
    D[i][j+1] = B[i-1][j+2] * C[i-1][j];
    A[i][j] = D[i][j] * 5;
    B[i][j] = A[i][j] + 1;
    C[i][j] = A[i][j] + 2;
  }
  A[i][n] = D[i][n] * 5;
  B[i][n] = A[i][n] + 1;
  C[i][n] = A[i][n] + 2;
}
