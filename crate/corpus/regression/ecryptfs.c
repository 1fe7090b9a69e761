/* lock order of fs/ecryptfs/messaging.c in 2.6.28 */
int ecryptfs_process_response(struct ecryptfs_msg_ctx *msg_ctx, int seq)
{
	int rc = 0;

	mutex_lock(&msg_ctx->mux);
	mutex_lock(&ecryptfs_daemon_hash_mux);
	rc = find_daemon(seq);
	mutex_unlock(&ecryptfs_daemon_hash_mux);
	if (rc)
		goto unlock;
	msg_ctx->state = 2;
unlock:
	mutex_unlock(&msg_ctx->mux);
out:
	return rc;
}

static int ecryptfs_send_message_locked(char *data, int len)
{
	int rc;

	mutex_lock(&ecryptfs_msg_ctx_lists_mux);
	rc = queue_message(data, len);
	mutex_unlock(&ecryptfs_msg_ctx_lists_mux);
	return rc;
}

int ecryptfs_send_message(char *data, int len)
{
	int rc;

	mutex_lock(&ecryptfs_daemon_hash_mux);
	rc = ecryptfs_send_message_locked(data, len);
	mutex_unlock(&ecryptfs_daemon_hash_mux);
	return rc;
}

int ecryptfs_wait_for_response(struct ecryptfs_msg_ctx *msg_ctx)
{
	int rc = 0;

	mutex_lock(&ecryptfs_msg_ctx_lists_mux);
	mutex_lock(&msg_ctx->mux);
	rc = msg_ctx->state;
	mutex_unlock(&msg_ctx->mux);
	mutex_unlock(&ecryptfs_msg_ctx_lists_mux);
	return rc;
}
