/* planted: table_lock is taken twice on the retry path */
int table_insert(int key)
{
	int rc;

	mutex_lock(&table_lock);
	rc = try_insert(key);
	if (rc == -EAGAIN) {
		mutex_lock(&table_lock);
		rc = try_insert(key);
	}
	mutex_unlock(&table_lock);
	return rc;
}
